# lab package
