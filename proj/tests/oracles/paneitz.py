"""Paneitz operator of e^{2u} delta on R^4 against e^{-4u} Delta^2 f.

The covariant operator (Delta = div grad) is Delta^2 - div((2/3 R g - 2 Ric) grad).
The same expression with +div is printed for comparison."""
import sympy as sp

x = sp.symbols("x0:4")
u = x[0] / 5 + x[1] ** 2 / 10
f = sp.cos(sp.Rational(7, 10) * x[0] - x[3]) + sp.Rational(1, 5) * x[1] ** 2
pt = {x[0]: sp.Rational(3, 10), x[1]: -sp.Rational(1, 5), x[2]: sp.Rational(1, 10), x[3]: sp.Rational(1, 2)}

g = sp.exp(2 * u) * sp.eye(4)
gi = g.inv()
sqrtg = sp.exp(4 * u)
n = 4
Gam = [[[sum(gi[k, l] * (sp.diff(g[l, i], x[j]) + sp.diff(g[l, j], x[i]) - sp.diff(g[i, j], x[l])) for l in range(n)) / 2
          for j in range(n)] for i in range(n)] for k in range(n)]


def ricci(i, j):
    s = 0
    for k in range(n):
        s += sp.diff(Gam[k][i][j], x[k]) - sp.diff(Gam[k][i][k], x[j])
        for l in range(n):
            s += Gam[k][k][l] * Gam[l][i][j] - Gam[k][j][l] * Gam[l][i][k]
    return s


Ric = sp.Matrix(4, 4, lambda i, j: ricci(i, j))
R = sum(gi[i, j] * Ric[i, j] for i in range(n) for j in range(n))


def div(vec):
    return sum(sp.diff(sqrtg * vec[i], x[i]) for i in range(n)) / sqrtg


def lap(h):
    grad = [sum(gi[i, j] * sp.diff(h, x[j]) for j in range(n)) for i in range(n)]
    return div(grad)


df = [sp.diff(f, xi) for xi in x]
A = sp.Rational(2, 3) * R * gi - 2 * gi * Ric * gi
X = [sum(A[i, j] * df[j] for j in range(n)) for i in range(n)]
bilap = lap(lap(f))
d = div(X)
flat_bilap = sum(sp.diff(f, xi, 2) for xi in x)
flat_bilap = sum(sp.diff(flat_bilap, xi, 2) for xi in x)

ev = lambda e: sp.N(e.subs(pt), 20)
print("covariant P f      =", ev(bilap - d))
print("plus-div form      =", ev(bilap + d))
print("e^{-4u} Delta^2 f  =", ev(sp.exp(-4 * u) * flat_bilap))
