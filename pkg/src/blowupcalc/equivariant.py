"""Equivariant K-classes, inverse Euler classes and the wall-crossing kernels.

The normal classes are built from two slant relations (checked once against
GRR in the tests, never recomputed at runtime):

    ch_i RHom(E, C_m) = (-1)^{i+1} gamma_{i+1} - m (-1)^i nu_i
    ch_i RHom(C_m, E) = -gamma_{i+1} - (m+1) nu_i

with C_m = O_C(-m-1).  The shift [1] negates both.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Dict, Sequence, Tuple

from .algebra import GradedPoly, LaurentInT, as_fraction
from .chern import chern_from_ch
from .slant import SlantAlgebra


class LocalizationError(ArithmeticError):
    """Euler class of a class with zero weight."""


@dataclass(frozen=True)
class EquivKClass:
    """rank + sum ch_i, twisted by exp(sum_a w_a t_a)."""

    rank: int
    ch: Tuple[GradedPoly, ...]
    weight: Tuple[Tuple[str, Fraction], ...]

    def __post_init__(self):
        if not self.ch:
            raise ValueError("need at least ch_0")
        c0 = self.ch[0]
        if not c0.is_constant() or c0.constant_term() != self.rank:
            raise ValueError("ch_0 must be the rank")
        for i, c in enumerate(self.ch):
            if any(c.ring.degree(e) != i for e in c.terms):
                raise ValueError(f"ch_{i} is not homogeneous of degree {i}")
        object.__setattr__(self, "weight",
                           tuple((n, as_fraction(w)) for n, w in self.weight if w))

    @property
    def ring(self):
        return self.ch[0].ring

    def weight_map(self) -> Dict[str, Fraction]:
        return dict(self.weight)

    def is_pure_weight(self) -> bool:
        return all(not c for c in self.ch[1:])

    def __add__(self, other: "EquivKClass") -> "EquivKClass":
        if self.weight_map() != other.weight_map():
            raise ValueError("can only add classes with the same weight")
        n = max(len(self.ch), len(other.ch))
        z = self.ring.zero()
        chs = tuple((self.ch[i] if i < len(self.ch) else z) + (other.ch[i] if i < len(other.ch) else z)
                    for i in range(n))
        return EquivKClass(self.rank + other.rank, chs, self.weight)


def _class(alg: SlantAlgebra, rank, chs, weight) -> EquivKClass:
    rank = as_fraction(rank)
    if rank.denominator != 1:
        raise ValueError("non-integral rank")
    return EquivKClass(int(rank), tuple([alg.ring.const(rank)] + chs), weight)


def n_class_sheaf_to_exc(alg: SlantAlgebra, r: int, gamma1, tvar: str, m: int = 0) -> EquivKClass:
    """N(E, C_m e^{-t}): ch_i = (-1)^i (gamma_{i+1} + m nu_i), weight -t."""
    chs = []
    for i in range(1, alg.D + 1):
        chs.append((alg.gamma(i + 1, gamma1) + alg.nu(i, r) * m) * ((-1) ** i))
    return _class(alg, as_fraction(gamma1) + m * r, chs, ((tvar, -1),))


def n_class_exc_to_sheaf(alg: SlantAlgebra, r: int, gamma1, tvar: str, m: int = 0) -> EquivKClass:
    """N(C_m e^{-t}, E): ch_i = gamma_{i+1} + (m+1) nu_i, weight +t."""
    chs = [alg.gamma(i + 1, gamma1) + alg.nu(i, r) * (m + 1) for i in range(1, alg.D + 1)]
    return _class(alg, as_fraction(gamma1) + (m + 1) * r, chs, ((tvar, 1),))


def n_class_exc_to_exc(alg: SlantAlgebra, ta: str, tb: str) -> EquivKClass:
    """N(C e^{-t_a}, C e^{-t_b}) = -C^{t_a - t_b}: rank -1, no Chern data."""
    if ta == tb:
        raise ValueError("the diagonal (trace) part is excluded")
    return _class(alg, -1, [], ((ta, 1), (tb, -1)))


# ----------------------------------------------------------------------
# Euler classes
# ----------------------------------------------------------------------

def _linear_form(K: EquivKClass, tvars: Sequence[str]) -> LaurentInT:
    out = LaurentInT(K.ring, tvars, {})
    for n, w in K.weight:
        out = out + LaurentInT.t(K.ring, tvars, n, 1, w)
    return out


def inverse_euler(K: EquivKClass, tvars: Sequence[str]) -> LaurentInT:
    """1/Eu(K) expanded at infinity in the weight variable.

    Uses log Eu(V e^{wt}) = rank log(wt) + sum_k (-1)^{k-1} (k-1)! ch_k (wt)^{-k},
    which is the Chern-root formula written additively and therefore makes sense
    for any virtual rank.
    """
    if not K.weight:
        raise LocalizationError("zero weight: Euler class not invertible")
    tvars = tuple(tvars)
    if K.is_pure_weight():
        lin = _linear_form(K, tvars)
        if K.rank <= 0:
            return lin ** (-K.rank)
        if len(K.weight) != 1:
            raise LocalizationError("multi-variable weight needs non-positive rank")
        return lin ** (-K.rank)
    if len(K.weight) != 1:
        raise LocalizationError("Chern data with a multi-variable weight is not supported")
    (name, w), = K.weight
    ring = K.ring
    S = LaurentInT(ring, tvars, {})
    for k in range(1, len(K.ch)):
        if not K.ch[k]:
            continue
        coeff = Fraction((-1) ** (k - 1) * factorial(k - 1)) / (w ** k)
        S = S + LaurentInT.t(ring, tvars, name, -k) * K.ch[k].scale(coeff)
    lead = LaurentInT.t(ring, tvars, name, -K.rank, w ** (-K.rank))
    return lead * (-S).exp()


def euler_chern_roots(K: EquivKClass, tvars: Sequence[str]) -> LaurentInT:
    """Independent check: Eu = sum_i c_i (wt)^{rank - i}, c from Newton's identities."""
    (name, w), = K.weight
    c = chern_from_ch(list(K.ch), len(K.ch) - 1)
    out = LaurentInT(K.ring, tvars, {})
    for i, ci in enumerate(c):
        if ci:
            out = out + LaurentInT.t(K.ring, tvars, name, K.rank - i, w ** (K.rank - i)) * ci
    return out


# ----------------------------------------------------------------------
# kernels
# ----------------------------------------------------------------------

def tnames(j: int) -> Tuple[str, ...]:
    return tuple(f"t{i}" for i in range(1, j + 1))


def single_wall_factor(alg: SlantAlgebra, r: int, gamma1, tvar: str, tvars, m: int = 0) -> LaurentInT:
    """1 / (Eu N(E, C_m e^{-t}) Eu N(C_m e^{-t}, E))."""
    a = inverse_euler(n_class_sheaf_to_exc(alg, r, gamma1, tvar, m), tvars)
    b = inverse_euler(n_class_exc_to_sheaf(alg, r, gamma1, tvar, m), tvars)
    return a * b


def cross_factor(alg: SlantAlgebra, ta: str, tb: str, tvars) -> LaurentInT:
    return inverse_euler(n_class_exc_to_exc(alg, ta, tb), tvars)


def omega_kernel(j: int, alg: SlantAlgebra, r: int, gamma1, m: int = 0) -> LaurentInT:
    """Kernel met by applying the one-wall operator j times (no 1/j!).

    ``gamma1`` belongs to the sheaf on the lower space, i.e. after removing all
    j copies of C_m.  Step k sees E plus the k-1 earlier copies, which contributes
    the cross factors with the earlier t's.
    """
    if j <= 0:
        raise ValueError("j must be positive")
    tv = tnames(j)
    out = LaurentInT.from_poly(alg.ring.one(), tv)
    for k, t in enumerate(tv):
        out = out * single_wall_factor(alg, r, gamma1, t, tv, m)
        for s in tv[:k]:
            out = out * cross_factor(alg, s, t, tv) * cross_factor(alg, t, s, tv)
    return out


def psi_kernel(j: int, alg: SlantAlgebra, r: int, gamma1, m: int = 0) -> LaurentInT:
    """The symmetrised kernel as displayed: (1/j!) prod_{i1 != i2}(t_i1 - t_i2) / prod Eu Eu."""
    if j <= 0:
        raise ValueError("j must be positive")
    tv = tnames(j)
    ring = alg.ring
    vand = LaurentInT.from_poly(ring.one(), tv)
    for a in tv:
        for b in tv:
            if a != b:
                vand = vand * (LaurentInT.t(ring, tv, a) - LaurentInT.t(ring, tv, b))
    den = LaurentInT.from_poly(ring.one(), tv)
    for t in tv:
        den = den * single_wall_factor(alg, r, gamma1, t, tv, m)
    return vand * den * Fraction(1, factorial(j))
