"""Partitions, Jacobi-Trudi determinants Delta_lambda, Pieri straightening, Grassmann pushforward.

Convention: the generators h_k are the Chern classes c_k(-V) of the tautological
rank-j subbundle V, so that Delta_lambda(h) is the Schubert class sigma_lambda
when the ambient bundle is trivial.
"""
from __future__ import annotations

import warnings
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Mapping, Sequence, Tuple, Union

Partition = Tuple[int, ...]


def partition(parts: Iterable[int]) -> Partition:
    p = tuple(int(x) for x in parts)
    if any(x < 0 for x in p) or any(p[i] < p[i + 1] for i in range(len(p) - 1)):
        raise ValueError(f"{p} is not a partition")
    while p and p[-1] == 0:
        p = p[:-1]
    return p


def _gen(gens, k):
    """x_k with x_0 = 1 and x_{<0} = 0.  gens is a sequence indexed from 0 or a callable."""
    if k < 0:
        return 0
    if k == 0:
        return 1
    if callable(gens):
        return gens(k)
    return gens[k] if k < len(gens) else 0


def _det(M):
    """Cofactor expansion; fine for the small sizes used here and works over any ring."""
    n = len(M)
    if n == 0:
        return 1
    if n == 1:
        return M[0][0]
    total = 0
    for col in range(n):
        a = M[0][col]
        if isinstance(a, int) and a == 0:
            continue
        minor = [row[:col] + row[col + 1:] for row in M[1:]]
        term = a * _det(minor)
        total = total + term if col % 2 == 0 else total - term
    return total


def delta_det(seq: Sequence[int], gens) -> object:
    """det(x_{seq_i + j - i}); ``seq`` need not be a partition."""
    d = len(seq)
    M = [[_gen(gens, seq[i] + j - i) for j in range(d)] for i in range(d)]
    return _det(M)


# ----------------------------------------------------------------------
# Pieri rule and straightening
# ----------------------------------------------------------------------

def _horizontal_strips(lam: Partition, k: int, max_parts: int = None,
                       max_first: int = None) -> List[Partition]:
    """All mu obtained from lam by adding a horizontal strip of size k."""
    lam = list(lam)
    n = len(lam) + 1
    if max_parts is not None:
        n = min(n, max_parts)
        if len(lam) > max_parts:
            return []
    lam_ext = lam + [0] * (n - len(lam))
    out = []

    def rec(i, remaining, acc):
        if i == n:
            if remaining == 0:
                mu = partition(acc)
                if max_first is None or (not mu or mu[0] <= max_first):
                    out.append(mu)
            return
        upper = remaining if i == 0 else min(remaining, lam_ext[i - 1] - lam_ext[i])
        for add in range(upper + 1):
            rec(i + 1, remaining - add, acc + [lam_ext[i] + add])

    rec(0, k, [])
    return out


def pieri(expansion: Mapping[Partition, object], k: int, max_parts: int = None,
          max_first: int = None) -> Dict[Partition, object]:
    out: Dict[Partition, object] = {}
    for lam, c in expansion.items():
        for mu in _horizontal_strips(lam, k, max_parts, max_first):
            out[mu] = out[mu] + c if mu in out else c
    return {mu: c for mu, c in out.items() if not (isinstance(c, (int, Fraction)) and c == 0)}


def straighten(h_exponents: Union[Mapping[int, int], Sequence[int]],
               max_parts: int = None) -> Dict[Partition, int]:
    """Write prod_k h_k^{a_k} in the basis Delta_lambda(h).

    ``h_exponents`` maps k -> a_k (or is a list of indices with repetition).
    Partitions with more than ``max_parts`` rows are discarded (they vanish on a
    rank-``max_parts`` bundle).
    """
    if not isinstance(h_exponents, Mapping):
        counts: Dict[int, int] = {}
        for k in h_exponents:
            counts[k] = counts.get(k, 0) + 1
        h_exponents = counts
    exp: Dict[Partition, int] = {(): 1}
    for k in sorted(h_exponents, reverse=True):
        if k < 0:
            raise ValueError("negative h index")
        for _ in range(h_exponents[k]):
            if k == 0:
                continue
            exp = pieri(exp, k, max_parts=max_parts)
    return exp


def reconstruct(expansion: Mapping[Partition, object], gens) -> object:
    total = 0
    for lam, c in expansion.items():
        total = total + c * delta_det(lam, gens)
    return total


def partitions_in_box(rows: int, cols: int, size: int = None) -> List[Partition]:
    out = []

    def rec(prefix, maxpart):
        if len(prefix) == rows:
            p = partition(prefix)
            if size is None or sum(p) == size:
                out.append(p)
            return
        for v in range(maxpart, -1, -1):
            rec(prefix + [v], v)

    rec([], cols)
    return sorted(set(out))


# ----------------------------------------------------------------------
# pushforwards
# ----------------------------------------------------------------------

def inverse_chern(chern: Sequence, n: int) -> List:
    """c(-W)_0..n from c(W) = chern[0..] (chern[0] = 1); works over any ring."""
    zero = chern[0] * 0
    out = [zero + 1]
    for k in range(1, n + 1):
        acc = zero
        for i in range(1, k + 1):
            if i < len(chern):
                acc = acc - chern[i] * out[k - i]
        out.append(acc)
    return out


def grassmann_push(expansion: Mapping[Partition, object], j: int, r: int,
                   minus_w_chern: Union[Sequence, Callable[[int], object]]) -> object:
    """pi_*(sum c_lambda Delta_lambda(c(-V))) = sum c_lambda Delta_{lambda - (r-j)}(c(-W)).

    ``minus_w_chern`` gives c_k(-W) (index 0 may be omitted / equals 1).
    Partitions with more than j parts are dropped, shorter ones padded with zeros.
    """
    if r < j:
        raise ValueError("Grassmann bundle needs r >= j")
    total = 0
    for lam, c in expansion.items():
        if len(lam) > j:
            continue
        shifted = [x - (r - j) for x in tuple(lam) + (0,) * (j - len(lam))]
        val = delta_det(shifted, minus_w_chern)
        if isinstance(val, int) and val == 0:
            continue
        total = total + c * val
    return total


def projective_push_power(k: int, r: int, minus_w_chern) -> object:
    """Push of xi^k along the projectivisation of a rank-r bundle (j = 1)."""
    if k == 0:
        return grassmann_push({(): 1}, 1, r, minus_w_chern)
    return grassmann_push({(k,): 1}, 1, r, minus_w_chern)


# ----------------------------------------------------------------------
# Schubert calculus oracle: Pieri multiplication in the j x (n-j) box
# ----------------------------------------------------------------------

def schubert_oracle(j: int, n: int, special: Union[Mapping[int, int], Sequence[int]],
                    start: Partition = ()) -> Fraction:
    """int_{Gr(j,n)} sigma_start * prod sigma_k^{a_k}, by iterated Pieri in the box.

    Returns 0 (with a warning) when the total degree is not j(n-j).
    """
    if not isinstance(special, Mapping):
        counts: Dict[int, int] = {}
        for k in special:
            counts[k] = counts.get(k, 0) + 1
        special = counts
    deg = sum(start) + sum(k * a for k, a in special.items())
    top = j * (n - j)
    if deg != top:
        warnings.warn(f"degree {deg} differs from dim Gr({j},{n}) = {top}; integral is 0")
        return Fraction(0)
    cur: Dict[Partition, int] = {partition(start): 1}
    for k in sorted(special):
        for _ in range(special[k]):
            if k > n - j:
                return Fraction(0)
            cur = pieri(cur, k, max_parts=j, max_first=n - j)
    full = tuple([n - j] * j)
    return Fraction(cur.get(full, 0))


def special_monomials(top: int, max_k: int) -> List[Dict[int, int]]:
    """All multisets of special indices in [1, max_k] summing to ``top``."""
    out = []

    def rec(rem, k, acc):
        if rem == 0:
            out.append(dict(acc))
            return
        if k == 0:
            return
        for a in range(rem // k, -1, -1):
            nxt = dict(acc)
            if a:
                nxt[k] = a
            rec(rem - a * k, k - 1, nxt)

    rec(top, max_k, {})
    return out
