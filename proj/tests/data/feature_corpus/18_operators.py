x = 5
y = -x ** 2 // 3 % 4 @ 1 << 2 >> 1 & 7 | 8 ^ 9
z = not x and ~y or +x
w = x < y <= z != x is not None in [1] not in []
x += 1; y -= 2; z *= 3
