x = 1