from fractions import Fraction
from itertools import product

import pytest

from blowupcalc import schur
from blowupcalc.algebra import Ring


def xring(n=6, D=8):
    return Ring([(f"x{i}", i) for i in range(1, n + 1)], D)


def gens(R):
    return [R.one()] + [R.var(f"x{i}") for i in range(1, R.nvars + 1)]


def test_delta_examples():
    R = xring()
    x = gens(R)
    assert schur.delta_det((1,), x) == x[1]
    assert schur.delta_det((1, 1), x) == x[1] * x[1] - x[2]
    assert schur.delta_det((0, 2), x) == -(schur.delta_det((1, 1), x))


def test_straighten_examples():
    assert schur.straighten({1: 1}) == {(1,): 1}
    assert schur.straighten({1: 2}) == {(2,): 1, (1, 1): 1}
    assert schur.straighten({2: 1, 1: 1}) == {(3,): 1, (2, 1): 1}


@pytest.mark.parametrize("mono", [{1: 3}, {2: 1, 1: 2}, {3: 1, 2: 1}, {1: 4}, {2: 2}, {4: 1, 1: 1}])
def test_straighten_reconstructs(mono):
    R = xring()
    x = gens(R)
    lhs = R.one()
    for k, a in mono.items():
        lhs = lhs * x[k] ** a
    assert schur.reconstruct(schur.straighten(mono), x) == lhs


def test_straighten_delta_identity():
    R = xring(D=10)
    x = gens(R)
    for lam in schur.partitions_in_box(2, 3):
        if not lam:
            continue
        # expand Delta_lambda as an h-polynomial, straighten each monomial, recombine
        poly = schur.delta_det(lam, x)
        back = {}
        for e, c in poly.terms.items():
            mono = {i + 1: k for i, k in enumerate(e) if k}
            for mu, d in schur.straighten(mono).items():
                back[mu] = back.get(mu, 0) + c * d
        back = {mu: c for mu, c in back.items() if c}
        assert back == {lam: 1}


def test_non_partition_sequences():
    R = xring(D=12)
    x = gens(R)
    for a, b in product(range(5), repeat=2):
        val = schur.delta_det((a, b), x)
        if a >= b:
            assert val == schur.delta_det(schur.partition((a, b)), x)
        elif b == a + 1:
            assert val == 0
        else:
            # row exchange: (a, b) -> (b - 1, a + 1) with a sign
            assert val == -schur.delta_det((b - 1, a + 1), x)


@pytest.mark.parametrize("j,n,expected", [(2, 4, 2), (2, 5, 5), (1, 3, 1), (1, 5, 1), (3, 6, 42)])
def test_sigma1_powers(j, n, expected):
    assert schur.schubert_oracle(j, n, {1: j * (n - j)}) == expected


def test_oracle_degree_mismatch_warns():
    with pytest.warns(UserWarning):
        assert schur.schubert_oracle(2, 4, {1: 3}) == 0


@pytest.mark.parametrize("j,n", [(2, 4), (2, 5), (3, 6)])
def test_grassmann_push_matches_oracle(j, n):
    r = n
    top = j * (n - j)
    trivial = [1]
    for mono in schur.special_monomials(top, n - j):
        got = schur.grassmann_push(schur.straighten(mono, max_parts=j), j, r, trivial)
        assert got == schur.schubert_oracle(j, n, mono), mono


def test_push_22_on_gr24():
    assert schur.grassmann_push({(2, 2): 1}, 2, 4, [1]) == 1
    assert schur.grassmann_push({(): 1}, 2, 4, [1]) == 0


@pytest.mark.parametrize("k", range(0, 5))
def test_projective_bundle_push(k):
    R = Ring([("w1", 1), ("w2", 2)], 6)
    cW = [R.one(), R.var("w1"), R.var("w2")]
    cmW = schur.inverse_chern(cW, 6)
    got = schur.projective_push_power(k, 2, cmW)
    expected = 0 if k == 0 else cmW[k - 1]
    assert got == expected


def _h(k, xs):
    """complete homogeneous symmetric polynomial h_k(xs) (numbers)."""
    from itertools import combinations_with_replacement
    from math import prod
    if k < 0:
        return 0
    return sum((prod(c) for c in combinations_with_replacement(xs, k)), 0) if k else 1


@pytest.mark.parametrize("s,r", [(1, 2), (1, 3), (2, 3), (2, 4), (3, 5)])
def test_grassmann_push_by_localization(s, r):
    """Torus-fixed points of Gr(s, W) with W = sum of lines of distinct weights w_i:
    pi_* phi = sum_I phi(I) / prod_{i in I, k not in I} (w_k - w_i)."""
    from itertools import combinations
    from blowupcalc.schur import grassmann_push, delta_det, partitions_in_box
    w = [Fraction(v) for v in (2, -3, 5, 7, -11)[:r]]
    minus_w = lambda k: (-1) ** k * _h(k, w)
    for size in range(s * (r - s), s * (r - s) + 4):
        for lam in partitions_in_box(s, size, size):
            lhs = Fraction(0)
            for I in combinations(range(r), s):
                wi = [w[i] for i in I]
                phi = delta_det(lam, lambda k: (-1) ** k * _h(k, wi))
                den = Fraction(1)
                for i in I:
                    for k in range(r):
                        if k not in I:
                            den *= w[k] - w[i]
                lhs += phi / den
            assert lhs == grassmann_push({lam: 1}, s, r, minus_w), (lam, s, r)
