"""Term rewriting over formal integrals on the moduli spaces M^m(c) of the blowup.

A live term is a pair (label, Q) standing for  int_{[M]} Phi(E) Q(E), with Q a
polynomial in slant variables.  Rules:

  wallcross   M^{m+1}(c)            -> M^m(c) and M^m(c - j e_m), j >= 1
  twist       M^0(p*c - j e), j >= 1 -> M^1(twisted class)           (E -> E(C))
  pushdown    M^1(p*c + s e), 0<s<r -> M^1(p*c)                      (Grassmann bundle)
  eliminate   M^0(p*c)              -> M_X(c) plus lower M^0 terms   (0 <-> 1 round trip)

Terms are processed in decreasing (vdim, 2k + m), k = -(C-coefficient of c_1),
which every rule strictly lowers.  Integrands are truncated to the degree window
allowed by the insertion, and empty windows delete the term.
"""
from __future__ import annotations

import hashlib
import json
import logging
import os
import warnings
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from pathlib import Path
from typing import Dict, List, Optional, Tuple

from . import chern as chm
from .algebra import GradedPoly, LaurentInT
from .chern import ChernCharacter
from .equivariant import omega_kernel, psi_kernel, tnames
from .geometry import generic_surface
from .insertion import (InsertionModel, eliminate_on_pullback_locus, grassmann_algebra,
                        h_chern_character, inverse_f_difference, level_one_substitution,
                        log_f_coeffs, mu_class, parse_insertion, parse_polynomial,
                        transform_direct_sum, transform_grassmann, transform_twist)
from .schur import grassmann_push, straighten
from .slant import SlantAlgebra

log = logging.getLogger(__name__)

MODES = ("iterated", "symmetrized", "both")


class EngineError(RuntimeError):
    pass


class VerificationError(EngineError):
    """A built-in cross-check failed (kernel modes disagree, round trip does not cancel,
    audit replay differs)."""


@dataclass(frozen=True)
class Label:
    kind: str                 # "level" or "base"
    m: int
    ch: ChernCharacter

    @property
    def k(self) -> int:
        return int(-self.ch.k) if self.kind == "level" else 0

    @property
    def gamma1(self) -> Fraction:
        return self.ch.ch1.dot(self.ch.surface.C)

    def vdim(self) -> int:
        return chm.vdim(self.ch)

    def key(self):
        if self.kind == "base":
            return (self.vdim(), float("-inf"), self.ch.ch2)
        return (self.vdim(), 2 * self.k + self.m, self.ch.ch2)

    def __str__(self):
        c = self.ch
        cs = ",".join(str(x) for x in c.ch1.coeffs)
        if self.kind == "base":
            return f"M_X(r={c.rank};ch1=[{cs}];ch2={c.ch2})"
        return f"M^{self.m}(r={c.rank};ch1=[{cs}];ch2={c.ch2})"


@dataclass
class ReductionResult:
    r: int
    j: int
    insertion: str
    D: int
    omega: Dict[int, GradedPoly]
    windows: Dict[int, Tuple[int, int]]
    audit: List[dict] = field(default_factory=list)
    kernel_ratios: Dict[int, Fraction] = field(default_factory=dict)
    cancellation_checks: int = 0
    base_shifts: Dict[str, int] = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "r": self.r, "j": self.j, "insertion": self.insertion, "D": self.D,
            "omega": {str(n): p.to_json() for n, p in sorted(self.omega.items())},
            "windows": {str(n): list(w) for n, w in sorted(self.windows.items())},
            "kernelRatios": {str(j): str(v) for j, v in sorted(self.kernel_ratios.items())},
        }

    def write_audit(self, path) -> None:
        with open(path, "w") as fh:
            for rec in self.audit:
                fh.write(json.dumps(rec, sort_keys=True) + "\n")

    def replay(self, records: Optional[List[dict]] = None) -> Dict[int, GradedPoly]:
        """Re-derive Omega_n by summing the logged deltas that land on base labels."""
        records = self.audit if records is None else records
        if not self.omega:
            return {}
        ring = next(iter(self.omega.values())).ring
        out: Dict[int, GradedPoly] = {}
        for rec in records:
            for lab, poly in rec["coefficientDelta"].items():
                n = self.base_shifts.get(lab)
                if n is None or n not in self.omega:
                    continue
                out[n] = out.get(n, ring.zero()) + _restrict(parse_polynomial(ring, poly),
                                                             self.windows[n])
        return out

    def verify_replay(self, records: Optional[List[dict]] = None) -> None:
        got = self.replay(records)
        for n, p in self.omega.items():
            if got.get(n, p.ring.zero()) != p:
                raise VerificationError(f"audit replay disagrees at n={n}")


# ----------------------------------------------------------------------
# helpers
# ----------------------------------------------------------------------

def _restrict(p: GradedPoly, window) -> GradedPoly:
    if window is None:
        return p.ring.zero()
    lo, hi = window
    deg = p.ring.degree
    return GradedPoly(p.ring, {e: c for e, c in p.terms.items() if lo <= deg(e) <= hi}, _trusted=True)


def laurent_subs(Q: GradedPoly, images: Dict[str, LaurentInT], tvars, T: int) -> LaurentInT:
    """Q with some variables replaced by Laurent polynomials, total degree <= T."""
    ring = Q.ring
    idx = [i for i, n in enumerate(ring.names) if n in images]
    groups: Dict[tuple, Dict[tuple, Fraction]] = {}
    for e, c in Q.terms.items():
        key = tuple(e[i] for i in idx)
        rest = list(e)
        for i in idx:
            rest[i] = 0
        groups.setdefault(key, {})[tuple(rest)] = c
    cache: Dict[Tuple[int, int], LaurentInT] = {}
    one = LaurentInT.from_poly(ring.one(), tvars)

    def power(i, k):
        if (i, k) not in cache:
            cache[(i, k)] = one if k == 0 else power(i, k - 1).mul_total(images[ring.names[i]], T)
        return cache[(i, k)]

    total = LaurentInT(ring, tvars, {})
    for key, rest in groups.items():
        term = LaurentInT.from_poly(GradedPoly(ring, rest, _trusted=True), tvars)
        for i, k in zip(idx, key):
            if k:
                term = term.mul_total(power(i, k), T)
        total = total + term
    return total


# ----------------------------------------------------------------------
# the engine
# ----------------------------------------------------------------------

class Reducer:
    def __init__(self, start: ChernCharacter, model: InsertionModel, mode: str = "iterated",
                 verify_cancellation: bool = False, start_level: Optional[int] = None,
                 initial: Optional[str] = None):
        if mode not in MODES:
            raise EngineError(f"unknown kernel mode {mode!r}")
        if not start.is_admissible():
            raise chm.NotAdmissibleError("start class is not admissible")
        self.start = start
        self.S = start.surface
        self.r = start.rank
        V = chm.vdim(start)
        self.model = model.resolve(V)
        w = self.model.window(V)
        if w is None:
            raise EngineError("insertion degree exceeds the virtual dimension")
        self.D = max(w[1], 0)
        self.alg = SlantAlgebra(self.D, self.model.extra_vars)
        self.mode = mode
        self.verify = verify_cancellation
        self.audit: List[dict] = []
        self.kernel_ratios: Dict[int, Fraction] = {}
        self.cancellation_checks = 0
        self.e0 = chm.exceptional_chern(self.S, 0)
        self.base_c = chm.pushforward_to_base(start)
        self.start_level = start_level
        self.initial = initial

    # -- bookkeeping --------------------------------------------------
    def window(self, label: Label):
        try:
            v = label.vdim()
        except ValueError:
            return None
        return self.model.window(v)

    def _record(self, rule, before: Label, after: List[Tuple[Label, GradedPoly]]):
        self.audit.append({
            "rule": rule,
            "labelBefore": str(before),
            "labelsAfter": [str(l) for l, _ in after],
            "coefficientDelta": {str(l): p.to_str() for l, p in after},
        })

    def initial_integrand(self) -> GradedPoly:
        ring = self.alg.ring
        extra = ring.one() if self.initial is None else self.alg.parse(self.initial)
        if self.model.mu_power:
            if self.r != 2:
                raise EngineError("mu insertions need rank 2")
            g1 = self.start.ch1.dot(self.S.C)
            return mu_class(self.alg, "[C]", g1) ** self.model.mu_power * extra
        return extra

    def gieseker_level(self) -> int:
        """Smallest M with no wall contributions at any level >= M."""
        m = 0
        while self._has_walls(self.start, m):
            m += 1
            if m > 10_000:
                raise EngineError("no Gieseker level found")
        return m

    def _wall_js(self, c: ChernCharacter, m: int):
        """j >= 1 with a non-empty degree window on M^m(c - j e_m)."""
        e = chm.exceptional_chern(self.S, m)
        V = chm.vdim(c)
        out = []
        j = 1
        while True:
            tgt = c - e * j
            lab = Label("level", m, tgt)
            if self.window(lab) is not None:
                out.append(j)
            drop = V - chm.vdim(tgt)
            slope = 2 * j + 1 + 2 * lab.gamma1 + (2 * m + 1) * self.r
            if drop > V and slope > 0:
                break
            j += 1
        return out

    def _has_walls(self, c, m) -> bool:
        return bool(self._wall_js(c, m))

    # -- wall terms -----------------------------------------------------
    def wall_term(self, upper: ChernCharacter, m: int, j: int, Q: GradedPoly,
                  mode: str, reverse_order: bool = False) -> Tuple[Label, GradedPoly]:
        """The j-th term of crossing from M^{m+1}(upper) to M^m(upper)."""
        alg, r = self.alg, self.r
        ring = alg.ring
        e = chm.exceptional_chern(self.S, m)
        lab = Label("level", m, upper - e * j)
        win = self.window(lab)
        if win is None:
            return lab, ring.zero()
        lo, hi = win
        g1 = lab.gamma1
        tv = tnames(j)
        kdeg = -j * (2 * g1 + (2 * m + 1) * r) + j * (j - 1)
        T = hi - j - kdeg
        if T < 0:
            return lab, ring.zero()
        T = int(T)
        # slants of the upper sheaf = lower sheaf + sum C_m e^{-t_k}
        images = {}
        for i in range(2, alg.D + 2):
            img = LaurentInT.from_poly(ring.var(f"gamma{i}"), tv)
            for t in tv:
                img = img - LaurentInT.t(ring, tv, t, i - 1, Fraction((-1) ** (i - 1), factorial(i - 1)))
            images[f"gamma{i}"] = img
        F = laurent_subs(Q, images, tv, T)
        if self.model.multiplicative:
            g = log_f_coeffs(self.model.f, ring, T)
            for a, t in enumerate(tv):
                F = F.mul_total(transform_direct_sum(self.model, alg, r, g1, m, t, tv, T), T)
                for s in tv[:a]:
                    F = F.mul_total(inverse_f_difference(g, ring, tv, s, t, T), T)
                    F = F.mul_total(inverse_f_difference(g, ring, tv, t, s, T), T)
        results = {}
        for which in (("iterated", "symmetrized") if mode == "both" else (mode,)):
            if which == "iterated":
                K = omega_kernel(j, alg, r, g1, m) * Fraction(1, factorial(j))
            else:
                K = psi_kernel(j, alg, r, g1, m) * Fraction(1, factorial(j))
            prod = (F * K).homogeneous_total(hi - j) if lo == hi else F * K
            order = list(tv) if reverse_order else list(reversed(tv))
            res = prod.iterated_residue(order)
            results[which] = _restrict(res, win)
        if mode == "both":
            a, b = results["iterated"], results["symmetrized"]
            if a:
                ratio = self._ratio(b, a)
                old = self.kernel_ratios.get(j)
                if old is not None and old != ratio:
                    raise VerificationError(f"kernel ratio for j={j} is not constant")
                self.kernel_ratios[j] = ratio
            return lab, a
        return lab, results[mode]

    @staticmethod
    def _ratio(b: GradedPoly, a: GradedPoly):
        e, c = next(iter(a.terms.items()))
        ratio = b.terms.get(e, Fraction(0)) / c
        if b != a * ratio:
            raise VerificationError("symmetrized and iterated kernels are not proportional")
        return ratio

    def wallcross(self, label: Label, Q: GradedPoly, mode=None):
        """Terms on level m from a term on level m+1 (includes the m-level copy)."""
        mode = mode or self.mode
        m = label.m - 1
        out = [(Label("level", m, label.ch), _restrict(Q, self.window(Label("level", m, label.ch))))]
        for j in self._wall_js(label.ch, m):
            lab, p = self.wall_term(label.ch, m, j, Q, mode)
            if p:
                out.append((lab, p))
        return out

    # -- twist ----------------------------------------------------------
    def twist(self, label: Label, Q: GradedPoly):
        new = chm.twist(label.ch, self.S.C)
        Qn = Q.subs(self.alg.twist_back_map(self.r, 1)) * transform_twist(self.model, self.alg.ring)
        lab = Label("level", 1, new)
        return [(lab, _restrict(Qn, self.window(lab)))]

    # -- pushdown ---------------------------------------------------------
    def pushdown(self, label: Label, Q: GradedPoly):
        s = -label.k
        r = self.r
        if not 0 < s < r:
            raise EngineError("pushdown needs 0 < s < r")
        target = Label("level", 1, label.ch - self.e0 * s)
        win = self.window(target)
        alg = self.alg
        ring = alg.ring
        if win is None:
            return [(target, ring.zero())]
        big = grassmann_algebra(alg)
        bring = big.ring
        chV = h_chern_character(big, s)
        mapping = {f"gamma{i}": bring.var(f"gamma{i}") - chV[i - 1] for i in range(2, alg.D + 2)}
        integrand = Q.embed(bring).subs(mapping)
        integrand = integrand * transform_grassmann(self.model, big, r, target.gamma1, s)
        total = self.grassmann_pushforward(integrand, s)
        return [(target, _restrict(total, win))]

    def grassmann_pushforward(self, integrand: GradedPoly, s: int) -> GradedPoly:
        """Push a polynomial in slants of F and H_k = c_k(-V) along Gr(s, W) -> M^1(p^*c),
        W = Ext^1(C_0, F) of rank r with ch_i W = nu_i + gamma_{i+1}."""
        alg, r = self.alg, self.r
        ring = alg.ring
        bring = integrand.ring
        kappa = [ring.const(r)] + [alg.nu(i, r) + alg.gamma(i + 1, 0) for i in range(1, alg.D + 1)]
        cmw = chm.chern_from_ch([-x for x in kappa], alg.D)
        hidx = [bring.index(f"H{k}") for k in range(1, alg.D + 1)]
        slant_idx = [bring.index(n) for n in ring.names]
        pushed: Dict[tuple, GradedPoly] = {}
        total = ring.zero()
        for e, c in integrand.terms.items():
            hkey = tuple(e[i] for i in hidx)
            if hkey not in pushed:
                exps = {k + 1: a for k, a in enumerate(hkey) if a}
                val = grassmann_push(straighten(exps, max_parts=s), s, r, cmw)
                pushed[hkey] = val if isinstance(val, GradedPoly) else ring.const(val)
            img = pushed[hkey]
            if img:
                rest = tuple(e[i] for i in slant_idx)
                total = total + img * GradedPoly(ring, {rest: c}, _trusted=True)
        return total

    # -- eliminate --------------------------------------------------------
    def eliminate(self, label: Label, Q: GradedPoly):
        alg, r = self.alg, self.r
        base_ch = chm.pushforward_to_base(label.ch)
        base = Label("base", 0, base_ch)
        Qt = Q.subs(level_one_substitution(alg, r))
        out = [(base, _restrict(eliminate_on_pullback_locus(Qt, alg), self.window(label)))]
        up = Label("level", 1, label.ch)
        if self.verify:
            self.check_round_trip(up, Q)
        if Qt != Q:
            acc: Dict[Label, GradedPoly] = {}
            for j in self._wall_js(label.ch, 0):
                lab, a = self.wall_term(label.ch, 0, j, Qt, self.mode)
                _, b = self.wall_term(label.ch, 0, j, Q, self.mode)
                if a - b:
                    acc[lab] = a - b
            out.extend(acc.items())
        return out

    def check_round_trip(self, up: Label, Q: GradedPoly):
        """Crossing 0 -> 1 and back with the same Q: the j >= 1 terms must cancel in
        pairs.  The two crossings use opposite residue orders, so this also checks
        that the residues do not depend on the order."""
        for j in self._wall_js(up.ch, 0):
            lab1, down = self.wall_term(up.ch, 0, j, Q, self.mode)
            lab2, upc = self.wall_term(up.ch, 0, j, Q, self.mode, reverse_order=True)
            if lab1 != lab2 or down - upc:
                raise VerificationError(f"round-trip terms failed to cancel at j={j}")
            self.cancellation_checks += 1

    # -- driver -----------------------------------------------------------
    def run(self) -> Dict[Label, GradedPoly]:
        m0 = self.gieseker_level() if self.start_level is None else self.start_level
        live: Dict[Label, GradedPoly] = {}
        lab0 = Label("level", m0, self.start)
        live[lab0] = _restrict(self.initial_integrand(), self.window(lab0))
        done: Dict[Label, GradedPoly] = {}
        while live:
            label = max(live, key=lambda l: l.key())
            Q = live.pop(label)
            if label.kind == "base":
                done[label] = done.get(label, self.alg.ring.zero()) + Q
                continue
            if not Q:
                continue
            if label.m >= 1 and label.k >= 0:
                rule, out = "wallcross", self.wallcross(label, Q)
            elif label.m == 0 and label.k > 0:
                rule, out = "twist", self.twist(label, Q)
            elif label.m == 1 and label.k < 0:
                rule, out = "pushdown", self.pushdown(label, Q)
            elif label.m == 0 and label.k == 0:
                rule, out = "eliminate", self.eliminate(label, Q)
            else:
                raise EngineError(f"no rule applies to {label}")
            out = [(l, p) for l, p in out if p]
            for l, p in out:
                if l.kind != "base" and not l.key() < label.key():
                    raise EngineError(f"rule {rule} did not decrease the measure: {label} -> {l}")
                live[l] = live[l] + p if l in live else p
            self._record(rule, label, out)
        return done

    def result(self) -> ReductionResult:
        done = self.run()
        omega: Dict[int, GradedPoly] = {}
        windows: Dict[int, Tuple[int, int]] = {}
        shifts: Dict[str, int] = {}
        for lab, p in done.items():
            n = lab.ch.ch2 - self.base_c.ch2
            if n.denominator != 1:
                raise EngineError("non-integral point shift")
            n = int(n)
            shifts[str(lab)] = n
            omega[n] = omega.get(n, self.alg.ring.zero()) + p
            windows[n] = self.window(lab)
        for n in list(omega):
            if windows[n] is None:
                del omega[n], windows[n]
        return ReductionResult(self.r, int(-self.start.k), self.model.descriptor(), self.D,
                               omega, windows, self.audit, self.kernel_ratios,
                               self.cancellation_checks, shifts)


# ----------------------------------------------------------------------
# entry points
# ----------------------------------------------------------------------

def standard_start(r: int, j: int, D: int, model: InsertionModel) -> ChernCharacter:
    """A rank-r class p^*c - j e on a blowup whose window top equals D (or the next
    attainable value).  Universality makes the particular surface irrelevant."""
    if r < 1:
        raise EngineError("rank must be positive")
    if j < 0:
        raise EngineError("j must be non-negative")
    best = None
    for chi in range(0, 2 * r + 1):
        X = generic_surface(H2=1, KH=0, K2=0, chiO=chi)
        Xh = X.blowup()
        for a in range(0, 2 * r):
            for c2 in range(-50, 400):
                c = chm.from_chern_classes(X, r, X.H * a, c2)
                start = chm.pullback(Xh, c) - chm.exceptional_chern(Xh, 0) * j
                V = chm.vdim(start)
                w = model.resolve(V).window(V) if V >= 0 else None
                if w is None or w[1] < D:
                    continue
                cand = (w[1], chi, a, c2)
                if best is None or cand < best[0]:
                    best = (cand, start)
                break
    if best is None:
        raise EngineError("could not find a starting class")
    return best[1]


def _cache_path(key: dict) -> Optional[Path]:
    d = os.environ.get("WALLCROSS_CACHE_DIR")
    if not d:
        return None
    h = hashlib.sha256(json.dumps(key, sort_keys=True).encode()).hexdigest()
    return Path(d) / f"{h}.json"


def reduce_to_base(start: ChernCharacter, insertion, mode: str = "iterated",
                   verify_cancellation: bool = False, start_level: Optional[int] = None,
                   initial: Optional[str] = None) -> ReductionResult:
    model = parse_insertion(insertion) if isinstance(insertion, str) else insertion
    return Reducer(start, model, mode, verify_cancellation, start_level, initial).result()


def omega_series(r: int, j: int, insertion, D: int, mode: str = "iterated",
                 verify_cancellation: bool = False) -> ReductionResult:
    """Omega_n for (r, j, insertion) computed to degree D, using the on-disk cache when
    WALLCROSS_CACHE_DIR is set."""
    model = parse_insertion(insertion) if isinstance(insertion, str) else insertion
    key = {"r": r, "j": j, "insertion": model.descriptor(), "D": D, "mode": mode}
    path = _cache_path(key)
    if path is not None and path.exists():
        try:
            obj = json.loads(path.read_text())
            omega = {int(n): GradedPoly.from_json(p) for n, p in obj["omega"].items()}
            windows = {int(n): tuple(w) for n, w in obj["windows"].items()}
            ratios = {int(k): Fraction(v) for k, v in obj.get("kernelRatios", {}).items()}
            log.info("cache hit %s", path)
            return ReductionResult(r, j, obj["insertion"], obj["D"], omega, windows, [], ratios)
        except (OSError, ValueError, KeyError, TypeError) as exc:
            warnings.warn(f"ignoring unreadable cache entry {path}: {exc}")
    res = reduce_to_base(standard_start(r, j, D, model), model, mode, verify_cancellation)
    if path is not None:
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            tmp = path.with_suffix(".tmp")
            tmp.write_text(json.dumps(res.to_json(), sort_keys=True))
            tmp.replace(path)
        except OSError as exc:
            warnings.warn(f"could not write cache entry {path}: {exc}")
    return res


def donaldson_blowup(power: int, c2: int = 3) -> Fraction:
    """Coefficient c with  int_{M_Xhat(p^*c)} alpha mu([C])^power = c int_{M_X(c')} alpha."""
    return donaldson_reduction(power, c2)[0]


def donaldson_reduction(power: int, c2: int = 3) -> Tuple[Fraction, ReductionResult]:
    if not 0 <= power <= 4:
        raise EngineError("power of [C] must be in 0..4")
    X = generic_surface(H2=1, KH=-3, K2=9, chiO=1)
    Xh = X.blowup()
    c = chm.from_chern_classes(X, 2, X.H, c2)
    start = chm.pullback(Xh, c)
    res = reduce_to_base(start, parse_insertion(f"mu:[C]^{power}"))
    V = chm.vdim(start)
    total = Fraction(0)
    for n, p in res.omega.items():
        lab_v = chm.vdim(chm.ChernCharacter(X, 2, c.ch1, c.ch2 + n))
        if lab_v == V - power:
            if not p.is_constant():
                raise EngineError("Donaldson coefficient is not a number")
            total += p.constant_term()
    return total, res
