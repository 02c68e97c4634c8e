
match = 1
match.foo = 2
match(x)
match[1] = 3
print(match)
def match(a): return a
match x, y:
    case 1, 2: pass
    case *a, b: pass
match -x:
    case [1, 2, *rest]: pass
