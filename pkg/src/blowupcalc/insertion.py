"""Insertions Phi and how they change under the operations of the reduction.

Multiplicative insertions are Phi(E) = A(-RHom(E, E)) with A built from a
one-variable series f, f(0) = 1.  Supported f:

    chi_y : f(x) = (1-y) x / (1 - e^{-(1-y)x}) + y x   (y = 0 Todd, y = 1 Chern)
    chern : f(x) = 1 + x
    todd  : f(x) = x / (1 - e^{-x})

The chi_y series used here is the unit-normalised one; the unnormalised
x(1 - y e^{-x})/(1 - e^{-x}) differs by the factor (1-y) per Chern root, which
only rescales the integral by a power of (1-y) fixed by rank bookkeeping.

Opaque insertions carry a degree and nothing else.  A Donaldson insertion
"mu:[C]^k" is mu([C])^k times an opaque class filling the remaining degree.
"""
from __future__ import annotations

import ast
from dataclasses import dataclass, replace
from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .algebra import ConfigurationError, GradedPoly, LaurentInT, Ring
from .chern import ch_from_chern, chern_from_ch
from .equivariant import EquivKClass, n_class_exc_to_sheaf, n_class_sheaf_to_exc
from .slant import SlantAlgebra

F_KINDS = ("chi_y", "chern", "todd")


# ----------------------------------------------------------------------
# the series g = log f
# ----------------------------------------------------------------------

@lru_cache(maxsize=None)
def _log_f_table(kind: str, N: int) -> Tuple[Dict[int, Fraction], ...]:
    """Coefficients of x^m in log f, each a dict {power of y: coefficient}."""
    R = Ring([("y", 0), ("x", 1)], N)
    x, y = R.var("x"), R.var("y")
    if kind == "chern":
        f = R.one() + x
    else:
        u = x if kind == "todd" else (R.one() - y) * x
        # (1 - e^{-u})/u = sum_k (-u)^k/(k+1)!
        B = R.zero()
        for k in range(N + 1):
            B = B + (-u) ** k * Fraction(1, factorial(k + 1))
        f = B.inverse()
        if kind == "chi_y":
            f = f + y * x
    g = (f - 1).log1p()
    out = []
    for m in range(N + 1):
        row = {}
        for e, c in g.terms.items():
            if e[1] == m:
                row[e[0]] = c
        out.append(row)
    return tuple(out)


def log_f_coeffs(kind: str, ring: Ring, N: int) -> List[GradedPoly]:
    """g_0..g_N as constants (polynomials in y when kind is chi_y) of ``ring``."""
    if kind not in F_KINDS:
        raise ConfigurationError(f"unknown multiplicative series {kind!r}")
    out = []
    for row in _log_f_table(kind, N):
        p = ring.zero()
        for ypow, c in row.items():
            if ypow:
                p = p + ring.monomial({"y": ypow}, c)
            else:
                p = p + ring.const(c)
        out.append(p)
    return out


def f_values(kind: str, N: int) -> Tuple[Dict[int, Fraction], ...]:
    """Coefficients of f itself (used by tests and the demos)."""
    R = Ring([("y", 0), ("x", 1)], N)
    g = R.zero()
    for m, row in enumerate(_log_f_table(kind, N)):
        for yp, c in row.items():
            g = g + R.monomial({"y": yp, "x": m}, c)
    f = g.exp()
    return tuple({e[0]: c for e, c in f.terms.items() if e[1] == m} for m in range(N + 1))


# ----------------------------------------------------------------------
# models
# ----------------------------------------------------------------------

@dataclass(frozen=True)
class InsertionModel:
    f: Optional[str] = None          # multiplicative series, or None
    opaque_degree: Optional[int] = None
    mu_power: int = 0                # exponent of mu([C])
    mu_complement: bool = False      # opaque degree = start vdim - mu_power (resolved later)

    @property
    def multiplicative(self) -> bool:
        return self.f is not None

    @property
    def extra_vars(self) -> Tuple[Tuple[str, int], ...]:
        return (("y", 0),) if self.f == "chi_y" else ()

    def descriptor(self) -> str:
        parts = []
        if self.f:
            parts.append(self.f)
        if self.mu_power or self.mu_complement:
            parts.append(f"mu:[C]^{self.mu_power}")
        elif self.opaque_degree is not None:
            parts.append(f"opaque:{self.opaque_degree}")
        return "+".join(parts) or "opaque:0"

    def resolve(self, start_vdim: int) -> "InsertionModel":
        if self.mu_complement:
            return replace(self, opaque_degree=start_vdim - self.mu_power, mu_complement=False)
        return self

    def window(self, vdim: int) -> Optional[Tuple[int, int]]:
        """Allowed integrand degrees on a space of dimension ``vdim`` (None = empty)."""
        d = self.opaque_degree or 0
        top = vdim - d
        if top < 0:
            return None
        if self.multiplicative:
            return (0, top)
        return (top, top)


def parse_insertion(text: str) -> InsertionModel:
    """'chi_y', 'chern', 'todd', 'opaque:d', 'mu:[C]^k', joined with '+'."""
    model = InsertionModel()
    for part in (p.strip() for p in text.split("+")):
        if part in F_KINDS:
            if model.f:
                raise ConfigurationError("at most one multiplicative series")
            model = replace(model, f=part)
        elif part.startswith("opaque:"):
            model = replace(model, opaque_degree=int(part[7:]))
        elif part.startswith("mu:"):
            arg = part[3:].replace(" ", "")
            if arg == "[C]":
                k = 1
            elif arg.startswith("[C]^"):
                k = int(arg[4:])
            else:
                raise ConfigurationError(f"unsupported mu argument {arg!r}")
            if k < 0:
                raise ConfigurationError("negative mu power")
            model = replace(model, mu_power=k, mu_complement=True)
        else:
            raise ConfigurationError(f"unknown insertion {part!r}")
    return model


# ----------------------------------------------------------------------
# multiplicative classes
# ----------------------------------------------------------------------

def _linear(K: EquivKClass, tvars) -> LaurentInT:
    out = LaurentInT(K.ring, tvars, {})
    for n, w in K.weight:
        out = out + LaurentInT.t(K.ring, tvars, n, 1, w)
    return out


def mult_class(K: EquivKClass, g: Sequence[GradedPoly], tvars, T: int) -> LaurentInT:
    """A(K) up to total degree T, through log A = sum_{m,n} g_m m!/(m-n)! L^{m-n} ch_n."""
    ring = K.ring
    L = _linear(K, tvars)
    Lpow = [LaurentInT.from_poly(ring.one(), tvars)]
    for _ in range(T):
        Lpow.append(Lpow[-1] * L)
    S = LaurentInT(ring, tvars, {})
    for m in range(1, min(T, len(g) - 1) + 1):
        if not g[m]:
            continue
        for n in range(0, m + 1):
            chn = K.ch[n] if n < len(K.ch) else ring.zero()
            if not chn:
                continue
            c = g[m] * chn * Fraction(factorial(m), factorial(m - n))
            S = S + Lpow[m - n] * c
    return S.truncate_total(T).exp(total_trunc=T)


def inverse_f_difference(g: Sequence[GradedPoly], ring: Ring, tvars, ta: str, tb: str, T: int) -> LaurentInT:
    """1/f(t_a - t_b), i.e. A of the rank -1 class of weight t_a - t_b."""
    K = EquivKClass(-1, (ring.const(-1),), ((ta, 1), (tb, -1)))
    return mult_class(K, g, tvars, T)


def transform_direct_sum(model: InsertionModel, alg: SlantAlgebra, r: int, gamma1, m: int,
                         tvar: str, tvars, T: int) -> LaurentInT:
    """P(E,t) with Phi(E + C_m e^{-t}) = Phi(E) P(E,t).

    -RHom(E+Ce^{-t}, E+Ce^{-t}) + RHom(E,E) = N(E,C)e^{-t} + N(C,E)e^{t} - O, and
    A(-O) = 1/f(0) = 1.  (Derived from the definition: the weights here are the
    ones of the Euler classes in the kernel.)
    """
    one = LaurentInT.from_poly(alg.ring.one(), tvars)
    if not model.multiplicative:
        return one
    g = log_f_coeffs(model.f, alg.ring, T)
    a = mult_class(n_class_sheaf_to_exc(alg, r, gamma1, tvar, m), g, tvars, T)
    b = mult_class(n_class_exc_to_sheaf(alg, r, gamma1, tvar, m), g, tvars, T)
    return a.mul_total(b, T)


def transform_twist(model: InsertionModel, ring: Ring) -> GradedPoly:
    """Q with Phi(E(C)) = Phi(E) Q(E).  RHom(E(C),E(C)) = RHom(E,E), so always 1 here;
    mu-insertions are rewritten through the slant substitution instead."""
    return ring.one()


def h_chern_character(alg: SlantAlgebra, s: int) -> List[GradedPoly]:
    """ch_k(V) for a rank-s bundle V written through H_k = c_k(-V)."""
    ring = alg.ring
    H = [ring.one()] + [ring.var(f"H{k}") for k in range(1, alg.D + 1)]
    chm = ch_from_chern(H, -s, alg.D)
    return [ring.const(s)] + [-c for c in chm[1:]]


def grassmann_algebra(alg: SlantAlgebra) -> SlantAlgebra:
    return alg.with_extra([(f"H{k}", k) for k in range(1, alg.D + 1)])


def transform_grassmann(model: InsertionModel, alg: SlantAlgebra, r: int, gamma1_F, s: int) -> GradedPoly:
    """R with Phi(F + C_0 (x) V) = Phi(F) R; ``alg`` must carry the H variables.

    -RHom(E,E) + RHom(F,F) = N(F,C_0) V + N(C_0,F) V^dual - V^dual V.
    """
    ring = alg.ring
    if not model.multiplicative:
        return ring.one()
    D = alg.D
    g = log_f_coeffs(model.f, ring, D)
    chV = h_chern_character(alg, s)
    p = [ring.const(s)] + [chV[k] * factorial(k) for k in range(1, D + 1)]
    pdual = [p[k] * (-1) ** k for k in range(D + 1)]
    A = n_class_sheaf_to_exc(alg, r, gamma1_F, "t", 0)
    B = n_class_exc_to_sheaf(alg, r, gamma1_F, "t", 0)
    S = ring.zero()
    for m in range(1, D + 1):
        if not g[m]:
            continue
        for n in range(0, m + 1):
            w = Fraction(factorial(m), factorial(m - n))
            S = S + g[m] * (A.ch[n] * p[m - n] + B.ch[n] * pdual[m - n]) * w
        vv = ring.zero()
        for l in range(0, m + 1):
            vv = vv + p[l] * p[m - l] * (comb(m, l) * (-1) ** (m - l))
        S = S - g[m] * vv
    return S.exp()


# ----------------------------------------------------------------------
# mu classes (rank 2)
# ----------------------------------------------------------------------

def mu_class(alg: SlantAlgebra, arg: str, gamma1) -> GradedPoly:
    """mu(sigma) = slant of c_2 - c_1^2/4 = c_1^2/4 - ch_2 for sigma in {[C], [pt]}."""
    if arg == "[C]":
        return alg.nu(1, 2) * (Fraction(gamma1) / 2) - alg.gamma(2, gamma1)
    if arg == "[pt]":
        return alg.nu(1, 2) ** 2 * Fraction(1, 4) - alg.nu(2, 2)
    raise ConfigurationError(f"unsupported mu argument {arg!r}")


def mu_crossing(alg: SlantAlgebra, arg: str, tvar: str, tvars, r: int = 2) -> LaurentInT:
    """Change of mu(arg) when C_m e^{-t} is added to E.  Pulled-back classes and [pt] do not move."""
    if r != 2:
        raise ConfigurationError("mu rules are stated for rank 2")
    ring = alg.ring
    if arg == "[C]":
        return -LaurentInT.t(ring, tvars, tvar) - LaurentInT.from_poly(alg.nu(1, 2) * Fraction(1, 2), tvars)
    if arg in ("[pt]", "alpha"):
        return LaurentInT(ring, tvars, {})
    raise ConfigurationError(f"unsupported mu argument {arg!r}")


# ----------------------------------------------------------------------
# relations used when eliminating on the pullback locus
# ----------------------------------------------------------------------

def eliminate_on_pullback_locus(expr: GradedPoly, alg: SlantAlgebra) -> GradedPoly:
    zero = alg.ring.zero()
    mapping = {f"gamma{i}": zero for i in range(2, alg.D + 2)}
    mapping["nu1"] = zero
    return expr.subs(mapping)


def relation_on_level_one(alg: SlantAlgebra, i: int, r: int) -> GradedPoly:
    """nu_i for i > r on M^1(p^*c): kappa_i = nu_i + gamma_{i+1} are ch of the rank-r
    bundle Ext^1(C_0, E), so kappa_i is Newton's polynomial in kappa_1..kappa_r."""
    if i <= r:
        raise ValueError("relations exist only above the rank")
    ring = alg.ring
    kappa = [ring.const(r)] + [alg.nu(k, r) + alg.gamma(k + 1, 0) for k in range(1, r + 1)]
    c = chern_from_ch(kappa, r)
    chs = ch_from_chern(c, r, i)
    return chs[i] - alg.gamma(i + 1, 0)


def level_one_substitution(alg: SlantAlgebra, r: int) -> Dict[str, GradedPoly]:
    return {f"nu{i}": relation_on_level_one(alg, i, r) for i in range(r + 1, alg.D + 1)}


# ----------------------------------------------------------------------
# parsing
# ----------------------------------------------------------------------

def parse_polynomial(ring: Ring, text: str) -> GradedPoly:
    """Evaluate an arithmetic expression over ring variables ('^' means power)."""
    tree = ast.parse(text.replace("^", "**"), mode="eval")

    def ev(node):
        if isinstance(node, ast.Expression):
            return ev(node.body)
        if isinstance(node, ast.Constant) and isinstance(node.value, int):
            return ring.const(node.value)
        if isinstance(node, ast.Name):
            return ring.var(node.id)
        if isinstance(node, ast.UnaryOp) and isinstance(node.op, (ast.USub, ast.UAdd)):
            v = ev(node.operand)
            return -v if isinstance(node.op, ast.USub) else v
        if isinstance(node, ast.BinOp):
            a = ev(node.left)
            if isinstance(node.op, ast.Pow):
                if not (isinstance(node.right, ast.Constant) and isinstance(node.right.value, int)):
                    raise ValueError("exponents must be integer literals")
                return a ** node.right.value
            b = ev(node.right)
            if isinstance(node.op, ast.Add):
                return a + b
            if isinstance(node.op, ast.Sub):
                return a - b
            if isinstance(node.op, ast.Mult):
                return a * b
            if isinstance(node.op, ast.Div):
                if not b.is_constant():
                    raise ValueError("can only divide by a number")
                return a * (Fraction(1) / b.constant_term())
        raise ValueError(f"cannot parse {ast.dump(node)}")

    return ev(tree)
