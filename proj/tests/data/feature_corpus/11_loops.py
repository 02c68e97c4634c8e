def search(budget, dim):
    best = None
    for i in range(budget):
        x = [0.0] * dim
        while len(x) > 0 and best is None:
            x.pop()
        else:
            best = i
    return best
