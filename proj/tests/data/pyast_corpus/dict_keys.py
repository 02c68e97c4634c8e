x = {a: b for a, b in c}
y = {1: 2, 3: 4,}
