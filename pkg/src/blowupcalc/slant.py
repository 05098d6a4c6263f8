"""Slant-product variables of a universal sheaf on the blowup.

nu_i    = ch_i(E)/[pt]   (degree i, nu_0 = rank)
gamma_i = ch_i(E)/[C]    (degree i-1, gamma_1 = c_1 . C is a number)

Classes pulled back from the base surface are invariant under every operation
the engine performs, so they are never given variables; an opaque insertion of
known degree stands in for them.
"""
from __future__ import annotations

from fractions import Fraction
from math import factorial
from typing import Dict, Iterable, Tuple

from .algebra import GradedPoly, Ring


class SlantAlgebra:
    def __init__(self, D: int, extra: Iterable[Tuple[str, int]] = ()):
        self.D = int(D)
        extra = list(extra)
        vars_ = [(f"nu{i}", i) for i in range(1, self.D + 1)]
        vars_ += [(f"gamma{i}", i - 1) for i in range(2, self.D + 2)]
        self.extra = tuple(extra)
        self.ring = Ring(vars_ + extra, self.D)

    def __eq__(self, other):
        return isinstance(other, SlantAlgebra) and self.ring == other.ring

    def __hash__(self):
        return hash(self.ring)

    def with_extra(self, extra) -> "SlantAlgebra":
        names = {n for n, _ in self.extra}
        more = [(n, d) for n, d in extra if n not in names]
        return SlantAlgebra(self.D, list(self.extra) + more)

    def nu(self, i: int, r) -> GradedPoly:
        if i == 0:
            return self.ring.const(r)
        if i > self.D:
            return self.ring.zero()
        return self.ring.var(f"nu{i}")

    def gamma(self, i: int, gamma1) -> GradedPoly:
        if i == 1:
            return self.ring.const(gamma1)
        if i - 1 > self.D:
            return self.ring.zero()
        return self.ring.var(f"gamma{i}")

    def parse(self, text: str) -> GradedPoly:
        """Tiny parser for sums of products like ``'2*gamma2^2*nu1 - 1/2*nu2'``."""
        from .insertion import parse_polynomial
        return parse_polynomial(self.ring, text)

    # substitutions ---------------------------------------------------
    def twist_back_map(self, r: int, k: int = 1) -> Dict[str, GradedPoly]:
        """Rewrite slants of E in terms of E' = E(kC).

        ch(E(kC)) = ch(E) e^{kC}; only the H^0 part of ch_{i-1} meets C, so
        gamma_i(E(kC)) = gamma_i(E) - k nu_{i-1}(E) and nu is unchanged.  Hence
        gamma_i(E) = gamma_i(E') + k nu_{i-1}(E').  Only k = +-1 is needed, but the
        general form is exact too because C.C.C-type terms vanish after slant.
        """
        out = {}
        for i in range(2, self.D + 2):
            out[f"gamma{i}"] = self.ring.var(f"gamma{i}") + self.nu(i - 1, r) * k
        return out

    def gamma_shift_map(self, shifts: Dict[int, GradedPoly]) -> Dict[str, GradedPoly]:
        return {f"gamma{i}": self.ring.var(f"gamma{i}") + s for i, s in shifts.items()
                if 2 <= i <= self.D + 1}


def exceptional_gamma_shift(i: int) -> Tuple[Fraction, int]:
    """Adding C_m e^{-t} to E moves gamma_i by coeff * t^{i-1}; returns (coeff, power)."""
    return (-Fraction((-1) ** (i - 1), factorial(i - 1)), i - 1)
