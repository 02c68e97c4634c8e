lambda x: (yield)
x = [*a for a in b]
