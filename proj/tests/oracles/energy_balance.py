"""B(R) - alpha(R)^2 / (16 pi^2) for the exact bubble, from symbolic radial derivatives."""
import mpmath as mp
import sympy as sp

mp.mp.dps = 30
r, H = sp.symbols("r H", positive=True)
rho = sp.sqrt(H) / (4 * sp.sqrt(3))
u = -sp.log(1 + rho * r**2)
lap = lambda f: sp.diff(f, r, 2) + 3 / r * sp.diff(f, r)
du = sp.diff(u, r)
L = lap(u)
# boundary integrand with nu = e_r, xi = r e_r, on the sphere of area 2 pi^2 r^3
integrand = -sp.diff(L, r) * r * du + L * sp.diff(r * du, r) - sp.Rational(1, 2) * r * L**2
B = sp.simplify(2 * sp.pi**2 * r**3 * integrand)
Bf = sp.lambdify((r, H), B, "mpmath")


def alpha(height, radius):
    r0 = mp.sqrt(height) / (4 * mp.sqrt(3))
    return mp.quad(lambda t: 2 * height * 2 * mp.pi**2 * t**3 * (1 + r0 * t * t) ** -4, [0, radius])


for R in [5, 10, 20, 40]:
    d = Bf(mp.mpf(R), mp.mpf(1)) - alpha(1, R) ** 2 / (16 * mp.pi**2)
    print(f"R={R}: B - alpha^2/16pi^2 = {mp.nstr(d, 17)}")
