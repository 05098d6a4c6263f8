"""Rank one: blowup factor of chi_y genera of Hilbert schemes of points.

For r = 1 the moduli spaces are Hilbert schemes, and the ratio of generating
functions for X-hat and X is the product over k of 1/(1 - y^k q^k).  Here it is
computed from scratch by wall-crossing and compared with that product.
"""
from blowupcalc import omega_series
from blowupcalc.algebra import Ring

D = 6
res = omega_series(1, 0, "chi_y", D)
for n, p in sorted(res.omega.items()):
    print(f"Omega_{n} = {p.to_str()}")

# expand prod_k 1/(1 - y^k q^k) as a polynomial in y, coefficient of q^n
R = Ring([("y", 0)], 0)
y = R.var("y")
N = max(res.omega)
series = [R.one()] + [R.zero()] * N           # coefficients of q^0..q^N
for k in range(1, N + 1):
    # multiply by 1/(1 - y^k q^k) = sum_a y^{ka} q^{ka}
    new = [R.zero()] * (N + 1)
    for n in range(N + 1):
        a = 0
        while n - k * a >= 0:
            new[n] = new[n] + series[n - k * a] * y ** (k * a)
            a += 1
    series = new
ok = all(series[n].to_str() == res.omega[n].to_str() if n in res.omega else not series[n]
         for n in range(N + 1))
print("matches prod 1/(1 - y^k q^k):", ok)
