1