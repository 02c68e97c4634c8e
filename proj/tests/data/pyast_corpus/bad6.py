  x = 1
