"""Rank two: the chi_y blowup factor against the theta-quotient Z_a(y, q).

Z_a(y, q) = sum_n y^{((2n+a)^2 - (2n+a))/2} q^{(2n+a)^2/4} / prod_n (1 - y^{2n} q^n)^2

is the conjectured shape of the rank-2 blowup factor.  The wall-crossing output
Omega_n is a polynomial in y (no nu_2 appears), and it lines up with the
coefficient of q^{n - 3a/4} in Z_a.  D = 6 takes a few seconds per a.
"""
from fractions import Fraction

from blowupcalc import omega_series, z_a

for a in (0, 1):
    res = omega_series(2, a, "chi_y", 6)
    Z = z_a(a, 3).normalized()
    print(f"a = {a}")
    for n, p in sorted(res.omega.items()):
        e = n - Fraction(3 * a, 4)
        row = " + ".join(f"{c}*y^{k}" for (ee, k), c in sorted(Z.items()) if ee == e)
        print(f"  Omega_{n} = {p.to_str():<24}  Z_{a} at q^{e}: {row}")
