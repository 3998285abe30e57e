# cocycles package
