"""Even algebraic cohomology of a surface and of its one-point blowup."""
from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

from .algebra import as_fraction


class UnsupportedError(ValueError):
    pass


class BasisMismatchError(ValueError):
    pass


def _frac_tuple(xs) -> Tuple[Fraction, ...]:
    return tuple(as_fraction(x) if not isinstance(x, str) else Fraction(x) for x in xs)


@dataclass(frozen=True)
class SurfaceModel:
    basis: Tuple[str, ...]
    matrix: Tuple[Tuple[Fraction, ...], ...]
    K: Tuple[Fraction, ...]
    chiO: int
    blowupDepth: int = 0

    def __post_init__(self):
        n = len(self.basis)
        object.__setattr__(self, "basis", tuple(self.basis))
        object.__setattr__(self, "matrix", tuple(_frac_tuple(row) for row in self.matrix))
        object.__setattr__(self, "K", _frac_tuple(self.K))
        if n == 0:
            raise ValueError("empty basis")
        if len(self.matrix) != n or any(len(r) != n for r in self.matrix):
            raise ValueError("intersection matrix has wrong shape")
        for i in range(n):
            for j in range(i):
                if self.matrix[i][j] != self.matrix[j][i]:
                    raise ValueError("intersection matrix not symmetric")
        if len(self.K) != n:
            raise ValueError("canonical class has wrong length")
        if self.blowupDepth not in (0, 1):
            raise UnsupportedError("only X and its single blowup are modelled")

    # -- classes
    @property
    def rank(self) -> int:
        return len(self.basis)

    def divisor(self, coeffs: Sequence) -> "DivisorClass":
        return DivisorClass(self, _frac_tuple(coeffs))

    def zero(self) -> "DivisorClass":
        return self.divisor([0] * self.rank)

    def basis_class(self, label: str) -> "DivisorClass":
        v = [0] * self.rank
        v[self.basis.index(label)] = 1
        return self.divisor(v)

    @property
    def H(self) -> "DivisorClass":
        return self.basis_class(self.basis[0])

    @property
    def canonical(self) -> "DivisorClass":
        return DivisorClass(self, self.K)

    @property
    def C(self) -> "DivisorClass":
        if self.blowupDepth != 1:
            raise UnsupportedError("exceptional curve only exists on a blowup model")
        return self.basis_class(self.basis[-1])

    def pair(self, a: "DivisorClass", b: "DivisorClass") -> Fraction:
        if a.surface != self or b.surface != self:
            raise BasisMismatchError("classes belong to a different surface model")
        M = self.matrix
        return sum((a.coeffs[i] * M[i][j] * b.coeffs[j]
                    for i in range(self.rank) for j in range(self.rank)), Fraction(0))

    # -- Todd class  td = 1 - K/2 + chiO [pt]
    def integrate_against_todd(self, rank, ch1: "DivisorClass", ch2) -> Fraction:
        """Degree-4 part of (rank + ch1 + ch2[pt]) * td."""
        return as_fraction(ch2) - self.pair(ch1, self.canonical) / 2 + as_fraction(rank) * self.chiO

    def todd(self):
        """(rank, ch1, ch2) components of td."""
        return (Fraction(1), DivisorClass(self, tuple(-k / 2 for k in self.K)), Fraction(self.chiO))

    # -- blowup
    def blowup(self, label: str = "C") -> "SurfaceModel":
        if self.blowupDepth != 0:
            raise UnsupportedError("iterated blowups are not supported")
        if label in self.basis:
            raise ValueError(f"label {label!r} already used")
        n = self.rank
        M = [list(r) + [Fraction(0)] for r in self.matrix]
        M.append([Fraction(0)] * n + [Fraction(-1)])
        return SurfaceModel(self.basis + (label,), tuple(map(tuple, M)),
                            self.K + (Fraction(1),), self.chiO, 1)

    def base(self) -> "SurfaceModel":
        """The surface this model blows up (inverse of blowup)."""
        if self.blowupDepth != 1:
            raise UnsupportedError("not a blowup model")
        n = self.rank - 1
        return SurfaceModel(self.basis[:n], tuple(r[:n] for r in self.matrix[:n]),
                            self.K[:n], self.chiO, 0)

    def pullback(self, d: "DivisorClass") -> "DivisorClass":
        """p^* from the base surface into this blowup model."""
        if self.blowupDepth != 1 or d.surface != self.base():
            raise BasisMismatchError("pullback needs a class on the base surface")
        return DivisorClass(self, d.coeffs + (Fraction(0),))

    def pushforward(self, d: "DivisorClass") -> "DivisorClass":
        """Forget the C-coefficient (p_* on H^2)."""
        if d.surface != self or self.blowupDepth != 1:
            raise BasisMismatchError("pushforward needs a class on this blowup")
        return DivisorClass(self.base(), d.coeffs[:-1])

    # -- io
    def to_json(self) -> dict:
        return {
            "basis": list(self.basis),
            "matrix": [[_num(x) for x in r] for r in self.matrix],
            "K": [_num(x) for x in self.K],
            "chiO": self.chiO,
        }

    @classmethod
    def from_json(cls, obj) -> "SurfaceModel":
        if isinstance(obj, str):
            obj = json.loads(obj)
        depth = int(obj.get("blowupDepth", 0))
        return cls(tuple(obj["basis"]), tuple(_frac_tuple(r) for r in obj["matrix"]),
                   _frac_tuple(obj["K"]), int(obj["chiO"]), depth)

    @classmethod
    def load(cls, path: str) -> "SurfaceModel":
        return cls.from_json(load_mapping(path))


def load_mapping(path) -> dict:
    """Read a JSON or TOML (by extension) file into a dict."""
    if str(path).endswith(".toml"):
        try:
            import tomllib
        except ModuleNotFoundError:      # Python < 3.11
            import tomli as tomllib
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    with open(path) as fh:
        return json.load(fh)


def _num(x: Fraction):
    return int(x) if x.denominator == 1 else str(x)


@dataclass(frozen=True)
class DivisorClass:
    surface: SurfaceModel
    coeffs: Tuple[Fraction, ...]

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _frac_tuple(self.coeffs))
        if len(self.coeffs) != self.surface.rank:
            raise BasisMismatchError("coefficient vector length differs from basis size")

    def _same(self, other):
        if not isinstance(other, DivisorClass) or other.surface != self.surface:
            raise BasisMismatchError("classes on different surfaces")

    def __add__(self, other):
        self._same(other)
        return DivisorClass(self.surface, tuple(a + b for a, b in zip(self.coeffs, other.coeffs)))

    def __sub__(self, other):
        self._same(other)
        return DivisorClass(self.surface, tuple(a - b for a, b in zip(self.coeffs, other.coeffs)))

    def __neg__(self):
        return DivisorClass(self.surface, tuple(-a for a in self.coeffs))

    def __mul__(self, k):
        k = as_fraction(k)
        return DivisorClass(self.surface, tuple(k * a for a in self.coeffs))

    __rmul__ = __mul__

    def dot(self, other: "DivisorClass") -> Fraction:
        return self.surface.pair(self, other)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def to_json(self):
        return [_num(x) for x in self.coeffs]


def projective_plane() -> SurfaceModel:
    return SurfaceModel(("H",), ((1,),), (-3,), 1)


def generic_surface(H2: int = 1, KH: int = 0, K2: int = 0, chiO: int = 1) -> SurfaceModel:
    """Two-class model spanned by H and K (falls back to H alone when K is a multiple)."""
    if K2 * H2 == KH * KH:
        if H2 == 0:
            raise ValueError("degenerate model")
        return SurfaceModel(("H",), ((H2,),), (Fraction(KH, H2),), chiO)
    return SurfaceModel(("H", "K"), ((H2, KH), (KH, K2)), (0, 1), chiO)
