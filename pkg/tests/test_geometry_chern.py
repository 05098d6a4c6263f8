import random
from fractions import Fraction

import pytest

from blowupcalc import chern as ch
from blowupcalc.algebra import Ring
from blowupcalc.geometry import (SurfaceModel, UnsupportedError, generic_surface,
                                 projective_plane)


@pytest.fixture
def P2hat():
    return projective_plane().blowup()


def test_blowup_example():
    Xh = projective_plane().blowup()
    assert Xh.basis == ("H", "C")
    assert Xh.matrix == ((1, 0), (0, -1))
    assert Xh.K == (-3, 1)
    assert Xh.chiO == 1
    with pytest.raises(UnsupportedError):
        Xh.blowup()


def test_blowup_isometric():
    X = generic_surface(H2=2, KH=1, K2=-3, chiO=2)
    Xh = X.blowup()
    rng = random.Random(1)
    for _ in range(10):
        a = X.divisor([rng.randint(-4, 4) for _ in range(X.rank)])
        b = X.divisor([rng.randint(-4, 4) for _ in range(X.rank)])
        assert Xh.pullback(a).dot(Xh.pullback(b)) == a.dot(b)
        assert Xh.pullback(a).dot(Xh.C) == 0
        assert a.dot(b) == b.dot(a)


def test_pairings(P2hat):
    H, C = P2hat.H, P2hat.C
    assert H.dot(H) == 1 and C.dot(C) == -1
    c1 = P2hat.pullback(projective_plane().H * 3)
    assert (c1 - C).dot(c1 - C) == c1.dot(c1) - 1


def test_todd_integrals(P2hat):
    S = P2hat
    assert S.integrate_against_todd(1, S.zero(), 0) == S.chiO
    assert S.integrate_against_todd(0, S.zero(), 1) == 1
    assert S.integrate_against_todd(0, S.C, 0) == Fraction(1, 2)


def test_json_roundtrip(P2hat):
    assert SurfaceModel.from_json(projective_plane().to_json()) == projective_plane()
    c = ch.ChernCharacter(P2hat, 2, P2hat.divisor([1, -1]), Fraction(-3, 2))
    assert ch.ChernCharacter.from_json(P2hat, c.to_json()) == c
    assert c.to_json()["ch2"] == "-3/2"


@pytest.mark.parametrize("m", range(-3, 4))
def test_twist_display(P2hat, m):
    S = P2hat
    E = ch.ChernCharacter(S, 2, S.divisor([1, 1]), Fraction(-5, 2))
    t = ch.twist(E, S.C * (-m))
    assert t.rank == E.rank
    assert t.ch1 == E.ch1 - S.C * (m * E.rank)
    assert t.ch2 == E.ch2 - m * S.C.dot(E.ch1) - Fraction(E.rank * m * m, 2)


def test_twist_group_law(P2hat):
    S = P2hat
    E = ch.ChernCharacter(S, 3, S.divisor([2, -1]), Fraction(1, 3))
    D1, D2 = S.divisor([1, 2]), S.divisor([-3, 1])
    assert ch.twist(E, S.zero()) == E
    assert ch.twist(ch.twist(E, D1), -D1) == E
    assert ch.twist(E, D1 + D2) == ch.twist(ch.twist(E, D1), D2)


def test_exceptional_classes(P2hat):
    S = P2hat
    assert ch.exceptional_chern(S, 0).ch2 == Fraction(-1, 2)
    assert ch.exceptional_chern(S, 1).ch2 == Fraction(-3, 2)
    O = ch.structure_sheaf(S)
    for m in range(-3, 4):
        e = ch.exceptional_chern(S, m)
        assert e == ch.twist(ch.exceptional_chern(S, 0), S.C * m)
        assert ch.euler_pairing(O, e) == -m


@pytest.mark.parametrize("d", range(-4, 5))
def test_chi_of_O_C_d(P2hat, d):
    # O_C(d) = C_{-d-1}
    e = ch.exceptional_chern(P2hat, -d - 1)
    assert ch.euler_characteristic(e) == d + 1


def test_pushforward(P2hat):
    X, S = projective_plane(), P2hat
    c = ch.ChernCharacter(X, 2, X.H, Fraction(-7, 2))
    pc = ch.pullback(S, c)
    assert ch.pushforward_to_base(pc) == c
    for j in range(-3, 4):
        assert ch.pushforward_to_base(pc - ch.exceptional_chern(S, 0) * j) == c
    # chi is preserved by Rp_* (Leray), for every twist by a multiple of C
    for k in range(-3, 4):
        t = ch.twist(pc, S.C * k)
        assert ch.euler_characteristic(ch.pushforward_to_base(t)) == ch.euler_characteristic(t)


def test_euler_pairing_examples(P2hat):
    S = P2hat
    O = ch.structure_sheaf(S)
    e0 = ch.exceptional_chern(S, 0)
    assert ch.euler_pairing(O, O) == S.chiO
    assert ch.euler_pairing(e0, e0) == 1
    E = ch.ChernCharacter(S, 2, S.divisor([1, 2]), 0)
    assert ch.euler_pairing(E, e0) == -E.ch1.dot(S.C)
    pb = ch.ChernCharacter(S, 2, S.divisor([1, 0]), 0)
    assert ch.euler_pairing(pb, e0) == 0


def test_serre_duality_random(P2hat):
    S = P2hat
    rng = random.Random(5)
    KS = ch.line_bundle(S.canonical)
    for _ in range(20):
        a = ch.ChernCharacter(S, rng.randint(-2, 3), S.divisor([rng.randint(-3, 3) for _ in range(2)]),
                              Fraction(rng.randint(-6, 6), 2))
        b = ch.ChernCharacter(S, rng.randint(-2, 3), S.divisor([rng.randint(-3, 3) for _ in range(2)]),
                              Fraction(rng.randint(-6, 6), 2))
        assert ch.euler_pairing(a, b) == ch.euler_pairing(b, a.tensor(KS))


def test_vdim_rank2():
    X = projective_plane()
    for n in range(0, 6):
        c = ch.from_chern_classes(X, 2, X.zero(), n)
        assert ch.vdim(c) == 4 * n - 3
    c = ch.from_chern_classes(X, 2, X.H, 3)
    assert ch.vdim(c) == 4 * 3 - 1 - 3


@pytest.mark.parametrize("j", range(0, 4))
@pytest.mark.parametrize("m", range(-2, 3))
def test_vdim_drop(P2hat, j, m):
    X = projective_plane()
    c = ch.pullback(P2hat, ch.from_chern_classes(X, 2, X.H, 4))
    assert ch.vdim(c) == ch.vdim(ch.pushforward_to_base(c))
    d = ch.vdim(c) - ch.vdim(c - ch.exceptional_chern(P2hat, m) * j)
    assert d == ch.vdim_drop(j, m)


def test_admissibility_preserved(P2hat):
    S = P2hat
    c = ch.ChernCharacter(S, 2, S.divisor([1, 0]), 0)
    assert c.is_admissible(2)
    assert ch.twist(c, S.C * 3).is_admissible(2)
    assert (c - ch.exceptional_chern(S, 2) * 3).is_admissible(2)
    assert not ch.ChernCharacter(S, 2, S.divisor([1, Fraction(1, 2)]), 0).is_admissible()


def test_newton_low_degree():
    a1, a2 = Fraction(3), Fraction(-2, 7)
    c = ch.chern_from_ch([2, a1, a2])
    assert c[1] == a1 and c[2] == a1 ** 2 / 2 - a2


def test_newton_rank_one():
    R = Ring([("c1", 1)], 6)
    x = R.var("c1")
    chs = ch.ch_from_chern([R.one(), x], 1, 6)
    from math import factorial
    for k in range(7):
        assert chs[k] == x ** k * Fraction(1, factorial(k))


def test_newton_two_roots():
    R = Ring([("a", 1), ("b", 1)], 5)
    a, b = R.var("a"), R.var("b")
    from math import factorial
    chs = [R.const(2)] + [(a ** k + b ** k) * Fraction(1, factorial(k)) for k in range(1, 6)]
    c = ch.chern_from_ch(chs)
    assert c[1] == a + b and c[2] == a * b
    assert all(not c[k] for k in range(3, 6))
    assert ch.ch_from_chern(c[:3], 2, 5) == chs
