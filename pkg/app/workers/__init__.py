# workers package
