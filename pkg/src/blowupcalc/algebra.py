"""Truncated graded polynomials over Q and Laurent expansions in equivariant parameters.

Everything is exact (``fractions.Fraction``).  A :class:`Ring` fixes the variable
table and the truncation degree ``D``; monomials of degree ``> D`` are dropped
on construction and after every product.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product as _iproduct
from typing import Callable, Dict, Iterable, Mapping, Sequence, Tuple, Union

Exps = Tuple[int, ...]
Number = Union[int, Fraction]


class ConfigurationError(ValueError):
    """Two operands live in incompatible rings."""


class NonInvertibleError(ArithmeticError):
    pass


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"refusing non-exact coefficient {x!r}")


class Ring:
    """Variable table plus truncation degree."""

    __slots__ = ("names", "degrees", "trunc", "_index")

    def __init__(self, variables: Iterable[Tuple[str, int]], trunc: int):
        variables = list(variables)
        self.names: Tuple[str, ...] = tuple(n for n, _ in variables)
        self.degrees: Tuple[int, ...] = tuple(int(d) for _, d in variables)
        if len(set(self.names)) != len(self.names):
            raise ConfigurationError("duplicate variable name")
        if any(d < 0 for d in self.degrees):
            raise ConfigurationError("negative variable degree")
        self.trunc = int(trunc)
        self._index = {n: i for i, n in enumerate(self.names)}

    # identity ---------------------------------------------------------
    def key(self):
        return (self.names, self.degrees, self.trunc)

    def __eq__(self, other):
        return isinstance(other, Ring) and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Ring({list(zip(self.names, self.degrees))}, D={self.trunc})"

    @property
    def nvars(self) -> int:
        return len(self.names)

    def index(self, name: str) -> int:
        try:
            return self._index[name]
        except KeyError:
            raise KeyError(f"unknown variable {name!r} in {self!r}") from None

    def degree(self, exps: Exps) -> int:
        return sum(e * d for e, d in zip(exps, self.degrees))

    def with_trunc(self, trunc: int) -> "Ring":
        return Ring(zip(self.names, self.degrees), trunc)

    # constructors -----------------------------------------------------
    def zero(self) -> "GradedPoly":
        return GradedPoly(self, {})

    def one(self) -> "GradedPoly":
        return self.const(1)

    def const(self, c: Number) -> "GradedPoly":
        return GradedPoly(self, {(0,) * self.nvars: as_fraction(c)})

    def var(self, name: str) -> "GradedPoly":
        e = [0] * self.nvars
        e[self.index(name)] = 1
        return GradedPoly(self, {tuple(e): Fraction(1)})

    def monomial(self, powers: Mapping[str, int], coeff: Number = 1) -> "GradedPoly":
        e = [0] * self.nvars
        for n, k in powers.items():
            e[self.index(n)] += k
        return GradedPoly(self, {tuple(e): as_fraction(coeff)})


class GradedPoly:
    """Sparse map monomial -> Fraction, truncated at the ring's degree."""

    __slots__ = ("ring", "terms")

    def __init__(self, ring: Ring, terms: Mapping[Exps, Number], _trusted: bool = False):
        self.ring = ring
        if _trusted:
            self.terms: Dict[Exps, Fraction] = dict(terms)
            return
        D = ring.trunc
        clean: Dict[Exps, Fraction] = {}
        for e, c in terms.items():
            e = tuple(e)
            if len(e) != ring.nvars:
                raise ConfigurationError("exponent vector has wrong length")
            if any(x < 0 for x in e):
                raise ValueError("negative exponent in polynomial")
            c = as_fraction(c)
            if c and ring.degree(e) <= D:
                clean[e] = clean.get(e, Fraction(0)) + c
        self.terms = {e: c for e, c in clean.items() if c}

    # helpers ----------------------------------------------------------
    def _check(self, other: "GradedPoly"):
        if self.ring.trunc != other.ring.trunc:
            raise ConfigurationError(
                f"mismatched truncation degrees {self.ring.trunc} vs {other.ring.trunc}")
        if self.ring != other.ring:
            raise ConfigurationError("mismatched variable tables")

    def _coerce(self, other) -> "GradedPoly":
        if isinstance(other, GradedPoly):
            self._check(other)
            return other
        if isinstance(other, (int, Fraction)):
            return self.ring.const(other)
        return NotImplemented

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for e, c in other.terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return GradedPoly(self.ring, out, _trusted=True)

    __radd__ = __add__

    def __neg__(self):
        return GradedPoly(self.ring, {e: -c for e, c in self.terms.items()}, _trusted=True)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c: Number) -> "GradedPoly":
        c = as_fraction(c)
        if not c:
            return self.ring.zero()
        return GradedPoly(self.ring, {e: c * v for e, v in self.terms.items()}, _trusted=True)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        ring = self.ring
        D = ring.trunc
        deg = ring.degree
        out: Dict[Exps, Fraction] = {}
        b_items = [(e, c, deg(e)) for e, c in other.terms.items()]
        for ea, ca in self.terms.items():
            da = deg(ea)
            for eb, cb, db in b_items:
                if da + db > D:
                    continue
                e = tuple(x + y for x, y in zip(ea, eb))
                v = out.get(e, 0) + ca * cb
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return GradedPoly(ring, out, _trusted=True)

    def __rmul__(self, other):
        return self.__mul__(other)

    def __pow__(self, n: int):
        if n < 0:
            raise ValueError("use inverse() for negative powers")
        result = self.ring.one()
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, c):
        if isinstance(c, (int, Fraction)):
            return self.scale(Fraction(1) / as_fraction(c))
        return self * c.inverse()

    # comparison -------------------------------------------------------
    def __eq__(self, other):
        if isinstance(other, (int, Fraction)):
            other = self.ring.const(other)
        if not isinstance(other, GradedPoly):
            return NotImplemented
        return self.ring == other.ring and self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    # inspection -------------------------------------------------------
    def constant_term(self) -> Fraction:
        return self.terms.get((0,) * self.ring.nvars, Fraction(0))

    def is_constant(self) -> bool:
        z = (0,) * self.ring.nvars
        return all(e == z for e in self.terms)

    def coeff(self, powers: Mapping[str, int]) -> Fraction:
        e = [0] * self.ring.nvars
        for n, k in powers.items():
            e[self.ring.index(n)] = k
        return self.terms.get(tuple(e), Fraction(0))

    def homogeneous(self, d: int) -> "GradedPoly":
        deg = self.ring.degree
        return GradedPoly(self.ring, {e: c for e, c in self.terms.items() if deg(e) == d},
                          _trusted=True)

    def max_degree(self) -> int:
        if not self.terms:
            return -1
        return max(self.ring.degree(e) for e in self.terms)

    def min_positive_part_degree(self) -> int:
        """Smallest degree among non-constant monomials (None when there are none)."""
        z = (0,) * self.ring.nvars
        degs = [self.ring.degree(e) for e in self.terms if e != z]
        return min(degs) if degs else None

    def is_nilpotent(self) -> bool:
        """True when every monomial has strictly positive degree."""
        return all(self.ring.degree(e) > 0 for e in self.terms)

    def variables_used(self) -> set:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(self.ring.names[i])
        return used

    # ring maps --------------------------------------------------------
    def embed(self, ring: Ring) -> "GradedPoly":
        """Re-express in a ring whose variables contain ours (truncating to its D)."""
        idx = [ring.index(n) for n in self.ring.names]
        for n, d in zip(self.ring.names, self.ring.degrees):
            if ring.degrees[ring.index(n)] != d:
                raise ConfigurationError(f"variable {n} changes degree under embedding")
        out = {}
        for e, c in self.terms.items():
            f = [0] * ring.nvars
            for i, k in zip(idx, e):
                f[i] = k
            out[tuple(f)] = c
        return GradedPoly(ring, out)

    def subs(self, mapping: Mapping[str, "GradedPoly"], target: Ring = None) -> "GradedPoly":
        """Substitute variables by polynomials (in ``target``; default own ring).

        Variables not mentioned are kept, so they must exist in the target ring.
        """
        target = target or self.ring
        images = []
        for n in self.ring.names:
            if n in mapping:
                img = mapping[n]
                if isinstance(img, (int, Fraction)):
                    img = target.const(img)
                if img.ring != target:
                    raise ConfigurationError("substitution image in wrong ring")
                images.append(img)
            else:
                images.append(target.var(n))
        cache: Dict[Tuple[int, int], GradedPoly] = {}

        def power(i, k):
            if (i, k) not in cache:
                cache[(i, k)] = images[i] ** k
            return cache[(i, k)]

        total = target.zero()
        for e, c in self.terms.items():
            term = target.const(c)
            for i, k in enumerate(e):
                if k:
                    term = term * power(i, k)
                    if not term:
                        break
            total = total + term
        return total

    def compose(self, coeffs: Callable[[int], Fraction]) -> "GradedPoly":
        """Evaluate the formal series sum_n coeffs(n) * self**n (self must be nilpotent)."""
        if not self.is_nilpotent():
            raise NonInvertibleError("series composition needs a nilpotent argument")
        out = self.ring.const(coeffs(0))
        p = self.ring.one()
        n = 0
        while True:
            n += 1
            p = p * self
            if not p:
                break
            c = as_fraction(coeffs(n))
            if c:
                out = out + p.scale(c)
        return out

    def inverse(self) -> "GradedPoly":
        c = self.constant_term()
        if not c:
            raise NonInvertibleError("constant term is zero")
        g = (self - c).scale(Fraction(1) / c)
        if not g.is_nilpotent():
            raise NonInvertibleError("non-constant part involves degree-0 variables")
        return g.compose(lambda n: Fraction((-1) ** n)).scale(Fraction(1) / c)

    def exp(self) -> "GradedPoly":
        from math import factorial
        return self.compose(lambda n: Fraction(1, factorial(n)))

    def log1p(self) -> "GradedPoly":
        return self.compose(lambda n: Fraction((-1) ** (n + 1), n) if n else Fraction(0))

    # serialisation ----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "vars": [{"name": n, "degree": d} for n, d in zip(self.ring.names, self.ring.degrees)],
            "trunc": self.ring.trunc,
            "terms": [
                {"exps": list(e), "num": str(c.numerator), "den": str(c.denominator)}
                for e, c in sorted(self.terms.items())
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GradedPoly":
        ring = Ring([(v["name"], v["degree"]) for v in obj["vars"]], obj["trunc"])
        terms = {tuple(t["exps"]): Fraction(int(t["num"]), int(t["den"])) for t in obj["terms"]}
        return cls(ring, terms)

    def __repr__(self):
        return f"GradedPoly({self.to_str()})"

    def to_str(self) -> str:
        if not self.terms:
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda it: (self.ring.degree(it[0]), it[0])):
            mon = "*".join(
                n if k == 1 else f"{n}^{k}" for n, k in zip(self.ring.names, e) if k)
            if not mon:
                parts.append(str(c))
            elif c == 1:
                parts.append(mon)
            elif c == -1:
                parts.append("-" + mon)
            else:
                parts.append(f"{c}*{mon}")
        return " + ".join(parts).replace("+ -", "- ")

    __str__ = to_str


# ----------------------------------------------------------------------
# Laurent expansions in t_1..t_j with GradedPoly coefficients
# ----------------------------------------------------------------------

class LaurentInT:
    """Finite sum of t-monomials (exponents may be negative) with GradedPoly coefficients.

    Only the coefficient degree is truncated.  t-exponents are unbounded, but
    every inverse produced by :meth:`invert` is a finite expansion because the
    correction terms are nilpotent.
    """

    __slots__ = ("ring", "tvars", "terms")

    def __init__(self, ring: Ring, tvars: Sequence[str], terms: Mapping[Exps, GradedPoly] = None):
        self.ring = ring
        self.tvars = tuple(tvars)
        out: Dict[Exps, GradedPoly] = {}
        for k, p in (terms or {}).items():
            k = tuple(k)
            if len(k) != len(self.tvars):
                raise ConfigurationError("t-exponent vector has wrong length")
            if p.ring != ring:
                if p.ring.trunc != ring.trunc:
                    raise ConfigurationError("mismatched truncation degrees")
                raise ConfigurationError("mismatched variable tables")
            if p:
                out[k] = out[k] + p if k in out else p
        self.terms = {k: p for k, p in out.items() if p}

    # constructors -----------------------------------------------------
    @classmethod
    def from_poly(cls, p: GradedPoly, tvars: Sequence[str]) -> "LaurentInT":
        return cls(p.ring, tvars, {(0,) * len(tvars): p})

    @classmethod
    def t(cls, ring: Ring, tvars: Sequence[str], name: str, power: int = 1,
          coeff: Number = 1) -> "LaurentInT":
        e = [0] * len(tvars)
        e[list(tvars).index(name)] = power
        return cls(ring, tvars, {tuple(e): ring.const(coeff)})

    def _coerce(self, other) -> "LaurentInT":
        if isinstance(other, LaurentInT):
            if other.ring.trunc != self.ring.trunc:
                raise ConfigurationError("mismatched truncation degrees")
            if other.ring != self.ring or other.tvars != self.tvars:
                raise ConfigurationError("mismatched variable tables")
            return other
        if isinstance(other, GradedPoly):
            if other.ring != self.ring:
                raise ConfigurationError("mismatched variable tables")
            return LaurentInT.from_poly(other, self.tvars)
        if isinstance(other, (int, Fraction)):
            return LaurentInT.from_poly(self.ring.const(other), self.tvars)
        return NotImplemented

    # arithmetic -------------------------------------------------------
    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out = dict(self.terms)
        for k, p in other.terms.items():
            out[k] = out[k] + p if k in out else p
        return LaurentInT(self.ring, self.tvars, out)

    __radd__ = __add__

    def __neg__(self):
        return LaurentInT(self.ring, self.tvars, {k: -p for k, p in self.terms.items()})

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return LaurentInT(self.ring, self.tvars,
                              {k: p.scale(other) for k, p in self.terms.items()})
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        out: Dict[Exps, GradedPoly] = {}
        for ka, pa in self.terms.items():
            for kb, pb in other.terms.items():
                prod = pa * pb
                if not prod:
                    continue
                k = tuple(x + y for x, y in zip(ka, kb))
                out[k] = out[k] + prod if k in out else prod
        return LaurentInT(self.ring, self.tvars, out)

    __rmul__ = __mul__

    def __pow__(self, n: int):
        if n < 0:
            return self.invert() ** (-n)
        result = LaurentInT.from_poly(self.ring.one(), self.tvars)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (Fraction(1) / as_fraction(other))
        other = self._coerce(other)
        return self * other.invert()

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except ConfigurationError:
            return False
        if other is NotImplemented:
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash((self.ring, self.tvars, frozenset(self.terms.items())))

    def __bool__(self):
        return bool(self.terms)

    def __repr__(self):
        if not self.terms:
            return "LaurentInT(0)"
        parts = []
        for k in sorted(self.terms, reverse=True):
            tm = "*".join(n if e == 1 else f"{n}^{e}" for n, e in zip(self.tvars, k) if e)
            parts.append(f"({self.terms[k]})" + (f"*{tm}" if tm else ""))
        return "LaurentInT(" + " + ".join(parts) + ")"

    # structure --------------------------------------------------------
    def unit_part(self):
        """Terms whose coefficient has a nonzero constant term."""
        return {k: p.constant_term() for k, p in self.terms.items() if p.constant_term()}

    def invert(self) -> "LaurentInT":
        """Inverse expanded at t = infinity.

        Requires f = c t^K (1 + g) with c a nonzero rational and g nilpotent;
        equivalently exactly one t-monomial carries a unit coefficient.
        """
        units = self.unit_part()
        if len(units) != 1:
            raise NonInvertibleError(
                f"expected exactly one leading unit monomial, found {len(units)}")
        (K, c), = units.items()
        inv_lead = LaurentInT(self.ring, self.tvars,
                              {tuple(-x for x in K): self.ring.const(Fraction(1) / c)})
        g = self * inv_lead - 1
        for p in g.terms.values():
            if not p.is_nilpotent():
                raise NonInvertibleError("correction term is not nilpotent")
        # sum (-g)^n terminates: each factor raises coefficient degree by >= 1
        out = LaurentInT.from_poly(self.ring.one(), self.tvars)
        power = out
        neg_g = -g
        while True:
            power = power * neg_g
            if not power:
                break
            out = out + power
        return out * inv_lead

    # total degree: each t counts 1, coefficients by their graded degree ----
    def total_degrees(self):
        deg = self.ring.degree
        out = set()
        for k, p in self.terms.items():
            for e in p.terms:
                out.add(sum(k) + deg(e))
        return out

    def truncate_total(self, T: int) -> "LaurentInT":
        """Drop every monomial whose total degree exceeds T."""
        deg = self.ring.degree
        out = {}
        for k, p in self.terms.items():
            room = T - sum(k)
            kept = {e: c for e, c in p.terms.items() if deg(e) <= room}
            if kept:
                out[k] = GradedPoly(self.ring, kept, _trusted=True)
        return LaurentInT(self.ring, self.tvars, out)

    def homogeneous_total(self, d: int) -> "LaurentInT":
        deg = self.ring.degree
        out = {}
        for k, p in self.terms.items():
            want = d - sum(k)
            kept = {e: c for e, c in p.terms.items() if deg(e) == want}
            if kept:
                out[k] = GradedPoly(self.ring, kept, _trusted=True)
        return LaurentInT(self.ring, self.tvars, out)

    def mul_total(self, other: "LaurentInT", T: int) -> "LaurentInT":
        """Product keeping only total degree <= T (valid when neither factor has
        negative-total-degree terms that could be needed to lower a dropped term)."""
        other = self._coerce(other)
        deg = self.ring.degree
        D = self.ring.trunc
        b_items = []
        for kb, pb in other.terms.items():
            sb = sum(kb)
            b_items.append((kb, sb, [(e, c, deg(e)) for e, c in pb.terms.items()]))
        out: Dict[Exps, Dict[Exps, Fraction]] = {}
        for ka, pa in self.terms.items():
            sa = sum(ka)
            for ea, ca in pa.terms.items():
                da = deg(ea)
                for kb, sb, bl in b_items:
                    room = T - sa - sb - da
                    if room < 0 and all(db > room for _, _, db in bl):
                        continue
                    k = tuple(x + y for x, y in zip(ka, kb))
                    slot = out.setdefault(k, {})
                    for eb, cb, db in bl:
                        if db > room or da + db > D:
                            continue
                        e = tuple(x + y for x, y in zip(ea, eb))
                        v = slot.get(e, 0) + ca * cb
                        if v:
                            slot[e] = v
                        else:
                            slot.pop(e, None)
        return LaurentInT(self.ring, self.tvars,
                          {k: GradedPoly(self.ring, v, _trusted=True) for k, v in out.items() if v})

    def exp(self, total_trunc: int = None) -> "LaurentInT":
        """exp(self); self must have no unit part.  Terminates when every term is
        coefficient-nilpotent, or when a total-degree bound is given and every term
        has positive total degree."""
        zero_k = (0,) * len(self.tvars)
        if zero_k in self.terms and self.terms[zero_k].constant_term():
            raise NonInvertibleError("exp needs an argument without constant part")
        if total_trunc is None and any(sum(k) > 0 for k in self.terms):
            raise NonInvertibleError("positive t-powers need a total-degree bound")
        one = LaurentInT.from_poly(self.ring.one(), self.tvars)
        out = one
        power = one
        n = 0
        while True:
            n += 1
            power = power * self if total_trunc is None else power.mul_total(self, total_trunc)
            power = power * Fraction(1, n)
            if not power:
                break
            out = out + power
            if n > 10_000:
                raise RuntimeError("exp series failed to terminate")
        return out

    def residue(self, name: str):
        """Coefficient of name^{-1}; drops the variable (GradedPoly when none remain)."""
        i = self.tvars.index(name)
        rest = self.tvars[:i] + self.tvars[i + 1:]
        out: Dict[Exps, GradedPoly] = {}
        for k, p in self.terms.items():
            if k[i] == -1:
                kk = k[:i] + k[i + 1:]
                out[kk] = out[kk] + p if kk in out else p
        res = LaurentInT(self.ring, rest, out)
        if not rest:
            return res.terms.get((), self.ring.zero())
        return res

    def iterated_residue(self, order: Sequence[str] = None) -> GradedPoly:
        """Take residues in ``order`` (default t_j first, ending with t_1)."""
        order = list(order) if order is not None else list(reversed(self.tvars))
        cur = self
        for n in order:
            cur = cur.residue(n)
        if isinstance(cur, LaurentInT):
            raise ValueError("residue order did not exhaust the variables")
        return cur

    def rename(self, perm: Mapping[str, str]) -> "LaurentInT":
        """Permute/rename the t variables (permutation of the same set)."""
        new_names = [perm.get(n, n) for n in self.tvars]
        if sorted(new_names) != sorted(self.tvars):
            raise ValueError("rename must permute the t variables")
        pos = [self.tvars.index(n) for n in new_names]
        out = {}
        for k, p in self.terms.items():
            kk = [0] * len(k)
            for src, dst in enumerate(pos):
                kk[dst] = k[src]
            out[tuple(kk)] = p
        return LaurentInT(self.ring, self.tvars, out)

    def extend_tvars(self, tvars: Sequence[str]) -> "LaurentInT":
        tvars = tuple(tvars)
        idx = [tvars.index(n) for n in self.tvars]
        out = {}
        for k, p in self.terms.items():
            kk = [0] * len(tvars)
            for i, e in zip(idx, k):
                kk[i] = e
            out[tuple(kk)] = p
        return LaurentInT(self.ring, tvars, out)

    def map_coeffs(self, fn: Callable[[GradedPoly], GradedPoly], ring: Ring = None) -> "LaurentInT":
        ring = ring or self.ring
        return LaurentInT(ring, self.tvars, {k: fn(p) for k, p in self.terms.items()})


def all_exponents(degrees: Sequence[int], max_degree: int) -> Iterable[Exps]:
    """Every exponent vector of weighted degree <= max_degree (degree-0 slots fixed to 0)."""
    ranges = [range(max_degree // d + 1) if d > 0 else range(1) for d in degrees]
    for e in _iproduct(*ranges):
        if sum(a * b for a, b in zip(e, degrees)) <= max_degree:
            yield e
