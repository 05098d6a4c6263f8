"""Chern characters (rank, ch1, ch2) on a surface or its blowup, plus Newton conversions."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import List, Sequence

from .algebra import as_fraction
from .geometry import DivisorClass, SurfaceModel, UnsupportedError


class NotAdmissibleError(ValueError):
    pass


@dataclass(frozen=True)
class ChernCharacter:
    """ch = rank + ch1 + ch2 [pt].  Also serves as a K-class on the surface (rank may be <= 0)."""

    surface: SurfaceModel
    rank: int
    ch1: DivisorClass
    ch2: Fraction

    def __post_init__(self):
        object.__setattr__(self, "ch2", as_fraction(self.ch2))
        if self.ch1.surface != self.surface:
            raise ValueError("ch1 lives on a different surface")

    # -- group structure (K-theory is additive in ch)
    def __add__(self, o: "ChernCharacter"):
        return ChernCharacter(self.surface, self.rank + o.rank, self.ch1 + o.ch1, self.ch2 + o.ch2)

    def __sub__(self, o: "ChernCharacter"):
        return ChernCharacter(self.surface, self.rank - o.rank, self.ch1 - o.ch1, self.ch2 - o.ch2)

    def __neg__(self):
        return ChernCharacter(self.surface, -self.rank, -self.ch1, -self.ch2)

    def __mul__(self, k: int):
        return ChernCharacter(self.surface, self.rank * k, self.ch1 * k, self.ch2 * k)

    __rmul__ = __mul__

    def tensor(self, o: "ChernCharacter") -> "ChernCharacter":
        return ChernCharacter(
            self.surface, self.rank * o.rank,
            self.ch1 * o.rank + o.ch1 * self.rank,
            self.ch2 * o.rank + o.ch2 * self.rank + self.ch1.dot(o.ch1))

    def dual(self) -> "ChernCharacter":
        return ChernCharacter(self.surface, self.rank, -self.ch1, self.ch2)

    @property
    def c1(self) -> DivisorClass:
        return self.ch1

    @property
    def c2(self) -> Fraction:
        return self.ch1.dot(self.ch1) / 2 - self.ch2

    # -- blowup data
    @property
    def k(self) -> Fraction:
        """Coefficient of [C] in ch1, so that ch1 = p^*c1 + k[C].  Note k = -(ch1 . C)."""
        if self.surface.blowupDepth != 1:
            raise UnsupportedError("k is only defined on a blowup model")
        return self.ch1.coeffs[-1]

    def is_admissible(self, r: int = None) -> bool:
        if self.surface.blowupDepth != 1:
            return False
        if r is not None and self.rank != r:
            return False
        return self.k.denominator == 1

    def to_json(self) -> dict:
        c = self.ch2
        return {"rank": self.rank, "ch1": self.ch1.to_json(),
                "ch2": f"{c.numerator}/{c.denominator}"}

    @classmethod
    def from_json(cls, surface: SurfaceModel, obj) -> "ChernCharacter":
        if isinstance(obj, str):
            obj = json.loads(obj)
        return cls(surface, int(obj["rank"]), surface.divisor(obj["ch1"]), Fraction(str(obj["ch2"])))

    def __repr__(self):
        return f"ch(r={self.rank}, ch1={list(map(str, self.ch1.coeffs))}, ch2={self.ch2})"


def from_chern_classes(surface: SurfaceModel, rank: int, c1: DivisorClass, c2) -> ChernCharacter:
    return ChernCharacter(surface, rank, c1, c1.dot(c1) / 2 - as_fraction(c2))


def structure_sheaf(surface: SurfaceModel) -> ChernCharacter:
    return ChernCharacter(surface, 1, surface.zero(), 0)


def point_class(surface: SurfaceModel) -> ChernCharacter:
    """ch of a skyscraper sheaf: [pt]."""
    return ChernCharacter(surface, 0, surface.zero(), 1)


def line_bundle(D: DivisorClass) -> ChernCharacter:
    return ChernCharacter(D.surface, 1, D, D.dot(D) / 2)


def twist(c: ChernCharacter, D: DivisorClass) -> ChernCharacter:
    """c * exp(D)."""
    return ChernCharacter(c.surface, c.rank, c.ch1 + D * c.rank,
                          c.ch2 + D.dot(c.ch1) + Fraction(c.rank) * D.dot(D) / 2)


def exceptional_chern(surface: SurfaceModel, m: int) -> ChernCharacter:
    """e_m = ch(O_C(-m-1)) = [C] - (m + 1/2)[pt]."""
    return ChernCharacter(surface, 0, surface.C, -(Fraction(m) + Fraction(1, 2)))


def pullback(blowup: SurfaceModel, c: ChernCharacter) -> ChernCharacter:
    return ChernCharacter(blowup, c.rank, blowup.pullback(c.ch1), c.ch2)


def pushforward_to_base(c: ChernCharacter) -> ChernCharacter:
    """ch(Rp_* E): forget the C part of ch1, shift ch2 by k/2."""
    if not c.is_admissible():
        raise NotAdmissibleError("pushforward needs an admissible class on the blowup")
    S = c.surface
    return ChernCharacter(S.base(), c.rank, S.pushforward(c.ch1), c.ch2 + c.k / 2)


def euler_pairing(a: ChernCharacter, b: ChernCharacter) -> Fraction:
    """chi(a, b) = int ch(a)^dual ch(b) td."""
    if a.surface != b.surface:
        raise ValueError("classes on different surfaces")
    prod = a.dual().tensor(b)
    return a.surface.integrate_against_todd(prod.rank, prod.ch1, prod.ch2)


def euler_characteristic(c: ChernCharacter) -> Fraction:
    return euler_pairing(structure_sheaf(c.surface), c)


def vdim(c: ChernCharacter, fixed_det: bool = True, irregularity: int = 0) -> int:
    if c.rank < 1:
        raise ValueError("vdim needs positive rank")
    v = -euler_pairing(c, c) + c.surface.chiO
    if not fixed_det:
        v += irregularity
    if v.denominator != 1:
        raise ValueError(f"non-integral virtual dimension {v}")
    return int(v)


def vdim_drop(j: int, m) -> Fraction:
    """Rank-2 drop j^2 + 4j(m + 1/2) of vdim(c - j e_m) against vdim(c)."""
    return j * j + 4 * j * (Fraction(m) + Fraction(1, 2))


# ----------------------------------------------------------------------
# Newton identities.  Work over any commutative ring whose elements support
# +, -, * and multiplication by Fraction (ints, Fractions, GradedPoly).
# ----------------------------------------------------------------------

def _zero_like(x):
    return x * 0


def chern_from_ch(ch: Sequence, n: int = None) -> List:
    """Chern classes c_0..c_n from ch_0..ch_n (c_0 = 1)."""
    n = len(ch) - 1 if n is None else n
    one = _zero_like(ch[0]) + 1
    p = [None] + [ch[k] * factorial(k) if k < len(ch) else _zero_like(ch[0]) for k in range(1, n + 1)]
    c = [one]
    for k in range(1, n + 1):
        acc = _zero_like(ch[0])
        for i in range(1, k + 1):
            term = c[k - i] * p[i]
            acc = acc + term if (i - 1) % 2 == 0 else acc - term
        c.append(acc * Fraction(1, k))
    return c


def ch_from_chern(c: Sequence, rank, n: int) -> List:
    """ch_0..ch_n from c_0..c_m (c_0 = 1; missing c_i treated as 0), with ch_0 = rank."""
    zero = _zero_like(c[0])

    def ci(i):
        return c[i] if i < len(c) else zero

    p = [None]
    for k in range(1, n + 1):
        acc = ci(k) * k if (k - 1) % 2 == 0 else -(ci(k) * k)
        for i in range(1, k):
            term = ci(k - i) * p[i]
            acc = acc + term if (k - 1 + i) % 2 == 0 else acc - term
        p.append(acc)
    return [zero + rank] + [p[k] * Fraction(1, factorial(k)) for k in range(1, n + 1)]
