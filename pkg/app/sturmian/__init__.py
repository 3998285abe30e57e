# sturmian package
