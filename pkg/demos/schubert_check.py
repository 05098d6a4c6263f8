"""Grassmann pushforward by Schur determinants against plain Schubert calculus.

Over a point the pushforward formula computes intersection numbers on Gr(j, n).
The oracle multiplies special Schubert classes by Pieri's rule inside the
j x (n - j) box; the two must agree on every top-degree monomial.
"""
from blowupcalc import schur

for j, n in [(2, 4), (2, 5), (3, 6)]:
    top = j * (n - j)
    monos = schur.special_monomials(top, n - j)
    agree = 0
    for mono in monos:
        push = schur.grassmann_push(schur.straighten(mono, max_parts=j), j, n, [1])
        agree += push == schur.schubert_oracle(j, n, mono)
    print(f"Gr({j},{n}): {agree}/{len(monos)} monomials agree;"
          f" sigma_1^{top} = {schur.schubert_oracle(j, n, {1: top})}")
