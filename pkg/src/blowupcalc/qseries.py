"""Truncated q-series with rational q-exponents and one auxiliary variable (x or z).

Quarter powers q^{n/4} are stored directly as ``Fraction`` exponents; internally
this is the same as working with a fourth root u of q.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, isqrt
from typing import Dict, List, Sequence, Tuple

Key = Tuple[int, int]  # (exponent of u = q^{1/4}, aux exponent)


def _binom(s: int, k: int) -> int:
    """Generalised binomial coefficient for any integer s."""
    if s >= 0:
        return comb(s, k)
    return (-1) ** k * comb(-s + k - 1, k)


def _u(e) -> int:
    e = Fraction(e) * 4
    if e.denominator != 1:
        raise ValueError("q-exponents must be multiples of 1/4")
    return int(e)


@dataclass(frozen=True)
class QSeries:
    """Coefficients keyed by (u-exponent, aux exponent) with u^4 = q; truncated at q^order."""

    terms: Dict[Key, object]
    uorder: int
    aux: str = "x"

    @property
    def order(self) -> Fraction:
        return Fraction(self.uorder, 4)

    @classmethod
    def make(cls, terms: Dict[Tuple[object, int], object], order, aux: str = "x") -> "QSeries":
        """Build from q-exponent keys (Fractions allowed)."""
        return cls._raw({(_u(e), a): c for (e, a), c in terms.items()}, _u(order), aux)

    @classmethod
    def _raw(cls, terms: Dict[Key, object], uorder: int, aux: str) -> "QSeries":
        return cls({k: v for k, v in terms.items() if v and k[0] <= uorder}, uorder, aux)

    @classmethod
    def one(cls, order, aux="x") -> "QSeries":
        return cls._raw({(0, 0): 1}, _u(order), aux)

    def _same(self, other: "QSeries"):
        if self.uorder != other.uorder or self.aux != other.aux:
            raise ValueError("q-series with different truncation or auxiliary variable")

    def __add__(self, other: "QSeries") -> "QSeries":
        self._same(other)
        t = dict(self.terms)
        for k, v in other.terms.items():
            t[k] = t.get(k, 0) + v
        return QSeries._raw(t, self.uorder, self.aux)

    def __sub__(self, other: "QSeries") -> "QSeries":
        return self + other.scale(-1)

    def scale(self, c) -> "QSeries":
        return QSeries._raw({k: v * c for k, v in self.terms.items()}, self.uorder, self.aux)

    def __mul__(self, other: "QSeries") -> "QSeries":
        self._same(other)
        N = self.uorder
        out: Dict[Key, object] = {}
        get = out.get
        items = sorted(other.terms.items())
        for (e1, a1), c1 in self.terms.items():
            room = N - e1
            for (e2, a2), c2 in items:
                if e2 > room:
                    break
                k = (e1 + e2, a1 + a2)
                out[k] = get(k, 0) + c1 * c2
        return QSeries._raw(out, N, self.aux)

    def inverse(self) -> "QSeries":
        c0 = self.terms.get((0, 0))
        if not c0 or any(e == 0 and a != 0 for (e, a) in self.terms):
            raise ArithmeticError("series must have constant term and no pure-aux q^0 part")
        g = self.scale(Fraction(1, 1) / c0) - QSeries.one(self.order, self.aux)
        out = QSeries.one(self.order, self.aux)
        p = out
        neg = g.scale(-1)
        while True:
            p = p * neg
            if not p.terms:
                break
            out = out + p
        return out.scale(Fraction(1, 1) / c0)

    def specialize_aux(self, value=1) -> "QSeries":
        value = Fraction(value)
        out: Dict[Key, object] = {}
        for (e, a), c in self.terms.items():
            k = (e, 0)
            out[k] = out.get(k, 0) + c * value ** a
        return QSeries._raw(out, self.uorder, self.aux)

    def coefficients(self) -> Dict[Fraction, Fraction]:
        """q-coefficients after setting the auxiliary variable to 1."""
        return {Fraction(e, 4): Fraction(c) for (e, _), c in self.specialize_aux(1).terms.items()}

    def q_support(self) -> set:
        return {Fraction(e, 4) for (e, _) in self.terms}

    def normalized(self) -> Dict[Tuple[Fraction, int], Fraction]:
        return {(Fraction(e, 4), a): Fraction(c) for (e, a), c in self.terms.items()}

    def to_json(self) -> List[dict]:
        rows = []
        has_aux = any(k[1] for k in self.terms)
        for (e, a), c in sorted(self.terms.items()):
            row = {"exponent": f"{e}/4", "coeff": str(Fraction(c))}
            if has_aux:
                row[self.aux] = a
            rows.append(row)
        return rows


def one_minus_monomial_power(qexp, auxexp: int, power: int, order, aux="x",
                             coeff: int = 1) -> QSeries:
    """(1 - coeff * aux^auxexp q^qexp)^power expanded to ``order``."""
    qexp = Fraction(qexp)
    if qexp <= 0:
        raise ValueError("monomial must carry a positive q power")
    terms: Dict[Key, int] = {}
    k = 0
    while k * qexp <= Fraction(order):
        b = _binom(power, k)
        if b:
            terms[(k * qexp, k * auxexp)] = b * (-coeff) ** k
        if power >= 0 and k >= power:
            break
        k += 1
    return QSeries.make(terms, order, aux)


def eta_like_product(order, power: int, aux_step: int = 0, aux="x") -> QSeries:
    """prod_{n>=1} (1 - aux^{aux_step*n} q^n)^power."""
    out = QSeries.one(order, aux)
    n = 1
    while n <= Fraction(order):
        out = out * one_minus_monomial_power(n, aux_step * n, power, order, aux)
        n += 1
    return out


def z_a(a: int, order) -> QSeries:
    """Z_a(x,q) = sum_n x^{((2n+a)^2-(2n+a))/2} q^{(2n+a)^2/4} / prod_n (1 - x^{2n} q^n)^2."""
    if a not in (0, 1):
        raise ValueError("a must be 0 or 1")
    order = Fraction(order)
    N = isqrt(int(order)) + 2
    num: Dict[Key, int] = {}
    for n in range(-N, N + 1):
        s_ = 2 * n + a
        e = Fraction(s_ * s_, 4)
        if e <= order:
            key = (e, (s_ * s_ - s_) // 2)
            num[key] = num.get(key, 0) + 1
    numerator = QSeries.make(num, order, "x")
    return numerator * eta_like_product(order, -2, aux_step=2, aux="x")


def blowup_euler_series(a: int, order) -> QSeries:
    """sum_{n in Z} q^{(n + a/2)^2} / prod (1 - q^n)^2, built independently of z_a."""
    order = Fraction(order)
    N = isqrt(int(order)) + 2
    num: Dict[Key, int] = {}
    for n in range(-N, N + 1):
        e = (n + Fraction(a, 2)) ** 2
        if e <= order:
            num[(e, 0)] = num.get((e, 0), 0) + 1
    denom = eta_like_product(order, 2, aux="x")
    return QSeries.make(num, order) * denom.inverse()


def goettsche_poincare(betti: Sequence[int], order) -> QSeries:
    """prod_k prod_{i=0..4} (1 - z^{2k-2+i} t^k)^{(-1)^{i+1} b_i}, with t written as q.

    ``betti`` is (b_1, b_2, b_3, b_4) with b_0 = 1 assumed, or the full (b_0, ..., b_4).
    The i = 0 factor carries b_0; without it the z = 1 specialisation would give
    prod (1 - q^k)^{-(chi - 1)} instead of the Euler series.  Odd Betti numbers enter
    with the sign-free convention, i.e. this is the signed Poincare polynomial p(-z).
    """
    betti = tuple(betti)
    if len(betti) == 4:
        betti = (1,) + betti
    if len(betti) != 5:
        raise ValueError("need Betti numbers b1..b4 (or b0..b4)")
    out = QSeries.one(order, "z")
    k = 1
    while k <= Fraction(order):
        for i in range(0, 5):
            b = betti[i]
            if b:
                out = out * one_minus_monomial_power(k, 2 * k - 2 + i, (-1) ** (i + 1) * b, order, "z")
        k += 1
    return out


def goettsche_euler(chi: int, order) -> QSeries:
    """prod (1 - q^k)^{-chi}."""
    return eta_like_product(order, -chi, aux="z")


def partition_numbers(order: int) -> List[int]:
    """Independent oracle: p(n) via the standard dynamic programme."""
    p = [1] + [0] * order
    for part in range(1, order + 1):
        for n in range(part, order + 1):
            p[n] += p[n - part]
    return p


def blowup_ratio_check(chi: int, order) -> dict:
    lhs = goettsche_euler(chi + 1, order) * goettsche_euler(chi, order).inverse()
    rhs = eta_like_product(order, -1, aux="z")
    return {"chi": chi, "order": int(order), "ok": lhs.terms == rhs.terms,
            "ratio": lhs.to_json()}
