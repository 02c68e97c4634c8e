counter = 0


def bump(step=1):
    global counter
    assert step > 0, 'positive'
    counter += step
    del step
    return counter


def gen():
    x = yield 1
    yield from range(x or 3)
