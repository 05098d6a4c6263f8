"""Command-line front end.

Every subcommand builds a JSON-able dict (the canonical output) and either prints it
(``--format json``) or a plain table derived from it.  Exit status: 0 on success,
2 when a built-in verification fails, 1 on usage or input errors.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import logging
import os
import sys
import tempfile
from fractions import Fraction
from pathlib import Path
from typing import Callable, Dict, List, Optional

from . import chern as chm
from . import qseries, schur
from .algebra import ConfigurationError
from .engine import (MODES, EngineError, VerificationError, donaldson_reduction,
                     omega_series, reduce_to_base)
from .geometry import SurfaceModel, generic_surface, load_mapping

log = logging.getLogger("blowupcalc")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse exits with 2 on bad flags; 2 is reserved for failed checks here
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def canonical(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _ints(text: str) -> List[int]:
    try:
        return [int(x) for x in str(text).replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of integers, got {text!r}")


def _fractions(text) -> List[Fraction]:
    if isinstance(text, (list, tuple)):
        return [Fraction(str(x)) for x in text]
    try:
        return [Fraction(x) for x in str(text).replace(" ", "").split(",") if x != ""]
    except ValueError:
        raise UsageError(f"expected a comma-separated list of rationals, got {text!r}")


# ----------------------------------------------------------------------
# surface and class input
# ----------------------------------------------------------------------

def _surface(args) -> SurfaceModel:
    if args.surface:
        return SurfaceModel.load(args.surface)
    return generic_surface(H2=args.H2, KH=args.KH, K2=args.K2, chiO=args.chiO)


def _base_class(args, X: SurfaceModel) -> chm.ChernCharacter:
    c1 = _fractions(args.c1)
    if len(c1) == 1 and X.rank > 1:
        c1 = c1 + [Fraction(0)] * (X.rank - 1)       # a bare number means a multiple of H
    if len(c1) != X.rank:
        raise UsageError(f"--c1 needs {X.rank} coefficients in the basis {list(X.basis)}")
    return chm.from_chern_classes(X, args.rank, X.divisor(c1), Fraction(str(args.c2)))


def _add_surface_flags(p):
    p.add_argument("--surface", help="surface model file (JSON or TOML)")
    p.add_argument("--H2", type=int, default=1)
    p.add_argument("--KH", type=int, default=0)
    p.add_argument("--K2", type=int, default=0)
    p.add_argument("--chiO", type=int, default=1)


def _add_run_flags(p):
    p.add_argument("--insertion", default="chi_y")
    p.add_argument("--mode", choices=MODES, default="iterated")
    p.add_argument("--verify-cancellation", action="store_true",
                   help="cross 0 -> 1 -> 0 at every elimination and check the wall terms cancel")
    p.add_argument("--audit", help="where to write the JSONL audit log")
    p.add_argument("--verify-log", action="store_true",
                   help="replay the audit log and compare with the reported coefficients")


# ----------------------------------------------------------------------
# audit handling
# ----------------------------------------------------------------------

def _audit_path(args, key: dict) -> Path:
    if args.audit:
        return Path(args.audit)
    d = os.environ.get("WALLCROSS_CACHE_DIR") or tempfile.gettempdir()
    h = hashlib.sha256(canonical(key).encode()).hexdigest()[:16]
    return Path(d) / f"audit-{h}.jsonl"


def _finish_reduction(args, res, key: dict) -> None:
    if res.audit:
        path = _audit_path(args, key)
        path.parent.mkdir(parents=True, exist_ok=True)
        res.write_audit(path)
        print(f"audit log: {path}", file=sys.stderr)
        if args.verify_log:
            with open(path) as fh:
                records = [json.loads(line) for line in fh if line.strip()]
            res.verify_replay(records)
            print("audit replay: ok", file=sys.stderr)
    else:
        print("audit log: none (result served from cache)", file=sys.stderr)


# ----------------------------------------------------------------------
# subcommands; each returns the canonical dict
# ----------------------------------------------------------------------

def cmd_vdim(args) -> dict:
    X = _surface(args)
    c = _base_class(args, X)
    return {"rank": args.rank, "c1": c.ch1.to_json(), "c2": str(Fraction(str(args.c2))),
            "vdim": chm.vdim(c)}


def cmd_donaldson(args) -> dict:
    coeff, res = donaldson_reduction(args.power, args.c2)
    _finish_reduction(args, res, {"cmd": "donaldson", "power": args.power, "c2": args.c2})
    return {"power": args.power, "c2": args.c2, "coefficient": str(coeff)}


def cmd_omega(args) -> dict:
    if args.D < 0:
        raise UsageError("--D must be non-negative")
    fresh = args.verify_log or args.verify_cancellation
    if fresh:
        # the cache keeps no audit trail, so checks always recompute
        saved = os.environ.pop("WALLCROSS_CACHE_DIR", None)
    try:
        res = omega_series(args.rank, args.j, args.insertion, args.D, args.mode,
                           args.verify_cancellation)
    finally:
        if fresh and saved is not None:
            os.environ["WALLCROSS_CACHE_DIR"] = saved
    key = {"cmd": "omega", "r": args.rank, "j": args.j, "insertion": args.insertion,
           "D": args.D, "mode": args.mode}
    _finish_reduction(args, res, key)
    out = res.to_json()
    out["omegaText"] = {str(n): p.to_str() for n, p in sorted(res.omega.items())}
    return out


def cmd_wallcross(args) -> dict:
    X = _surface(args)
    Xh = X.blowup()
    start = chm.pullback(Xh, _base_class(args, X)) - chm.exceptional_chern(Xh, 0) * args.j
    res = reduce_to_base(start, args.insertion, args.mode, args.verify_cancellation,
                         args.start_level, args.integrand)
    key = {"cmd": "wallcross", "surface": X.to_json(), "r": args.rank, "c1": str(args.c1),
           "c2": str(args.c2), "j": args.j, "insertion": args.insertion, "mode": args.mode,
           "startLevel": args.start_level, "integrand": args.integrand}
    _finish_reduction(args, res, key)
    out = res.to_json()
    out["start"] = {"vdim": chm.vdim(start), "ch1": start.ch1.to_json(), "ch2": str(start.ch2)}
    out["omegaText"] = {str(n): p.to_str() for n, p in sorted(res.omega.items())}
    out["cancellationChecks"] = res.cancellation_checks
    return out


def cmd_qseries(args) -> dict:
    if args.order < 0:
        raise UsageError("--order must be non-negative")
    if args.kind == "za":
        if args.a not in (0, 1):
            raise UsageError("--a must be 0 or 1")
        s = qseries.z_a(args.a, args.order)
        if args.x_spec is not None:
            s = s.specialize_aux(args.x_spec)
        return {"kind": "za", "a": args.a, "order": args.order, "series": s.to_json()}
    if args.kind == "goettsche":
        if args.betti:
            b = _ints(args.betti)
            s = qseries.goettsche_poincare(b, args.order)
            if args.z_spec is not None:
                s = s.specialize_aux(args.z_spec)
            return {"kind": "poincare", "betti": b, "order": args.order, "series": s.to_json()}
        if args.chi is None:
            raise UsageError("goettsche needs --chi or --betti")
        s = qseries.goettsche_euler(args.chi, args.order)
        return {"kind": "euler", "chi": args.chi, "order": args.order, "series": s.to_json()}
    if args.chi is None:
        raise UsageError("ratio needs --chi")
    rep = qseries.blowup_ratio_check(args.chi, args.order)
    if not rep["ok"]:
        raise VerificationError(f"blowup ratio check failed for chi={args.chi}")
    return {"kind": "ratio", **rep}


def cmd_schur(args) -> dict:
    j, n = args.j, args.n
    if not 0 < j < n:
        raise UsageError("need 0 < j < n")
    top = j * (n - j)
    if args.monomial:
        monos = [{}]
        for k in _ints(args.monomial):
            monos[0][k] = monos[0].get(k, 0) + 1
    else:
        monos = schur.special_monomials(top, n - j)
    rows = []
    bad = 0
    for mono in monos:
        deg = sum(k * a for k, a in mono.items())
        if deg != top:
            raise UsageError(f"monomial has degree {deg}, not dim Gr({j},{n}) = {top}")
        push = schur.grassmann_push(schur.straighten(mono, max_parts=j), j, n, [1])
        oracle = schur.schubert_oracle(j, n, mono)
        bad += push != oracle
        label = "*".join(f"s{k}^{a}" if a > 1 else f"s{k}" for k, a in sorted(mono.items()))
        rows.append({"monomial": label, "push": str(push), "oracle": str(oracle)})
    if bad:
        raise VerificationError(f"{bad} monomials disagree with the Schubert oracle")
    return {"j": j, "n": n, "integrals": rows}


# ----------------------------------------------------------------------
# tables
# ----------------------------------------------------------------------

def render_table(cmd: str, obj: dict) -> str:
    if cmd == "vdim":
        return f"vdim  {obj['vdim']}"
    if cmd == "donaldson":
        return f"power  {obj['power']}\ncoefficient  {obj['coefficient']}"
    if cmd in ("omega", "wallcross"):
        lines = [f"r={obj['r']}  j={obj['j']}  insertion={obj['insertion']}  D={obj['D']}"]
        for n, txt in obj["omegaText"].items():
            lo, hi = obj["windows"][n]
            lines.append(f"Omega_{n}  [deg {lo}..{hi}]  {txt}")
        if not obj["omegaText"]:
            lines.append("(no surviving terms)")
        for jj, ratio in obj.get("kernelRatios", {}).items():
            lines.append(f"symmetrized/iterated at j={jj}: {ratio}")
        return "\n".join(lines)
    if cmd == "qseries":
        if obj["kind"] == "ratio":
            return f"chi={obj['chi']}  order={obj['order']}  ok={obj['ok']}"
        rows = []
        for r in obj["series"]:
            extra = "  ".join(f"{k}^{v}" for k, v in r.items() if k not in ("exponent", "coeff"))
            rows.append(f"q^{r['exponent']}  {extra + '  ' if extra else ''}{r['coeff']}")
        return "\n".join(rows)
    if cmd == "schur":
        return "\n".join(f"{r['monomial']:<16} {r['push']:>6} {r['oracle']:>6}"
                         for r in obj["integrals"])
    return canonical(obj)


# ----------------------------------------------------------------------
# parser
# ----------------------------------------------------------------------

COMMANDS: Dict[str, Callable] = {
    "vdim": cmd_vdim, "donaldson": cmd_donaldson, "omega": cmd_omega,
    "wallcross": cmd_wallcross, "qseries": cmd_qseries, "schur": cmd_schur,
}


def build_parser() -> _Parser:
    common = _Parser(add_help=False)
    common.add_argument("--config", help="TOML or JSON file supplying flag defaults")
    common.add_argument("--format", choices=("table", "json"), default="table")
    common.add_argument("--output", help="also write the canonical JSON here")
    common.add_argument("-v", "--verbose", action="store_true")

    p = _Parser(prog="blowupcalc", description="Blowup formulas by wall-crossing.")
    sub = p.add_subparsers(dest="command", parser_class=_Parser)

    s = sub.add_parser("vdim", parents=[common], help="virtual dimension of a class on X")
    _add_surface_flags(s)
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--c1", default="0", help="coefficients in the surface basis")
    s.add_argument("--c2", default="0")

    s = sub.add_parser("donaldson", parents=[common], help="blowup coefficient of mu([C])^k")
    s.add_argument("--power", type=int, required=True)
    s.add_argument("--c2", type=int, default=3)
    s.add_argument("--audit")
    s.add_argument("--verify-log", action="store_true")

    s = sub.add_parser("omega", parents=[common], help="universal series Omega_n")
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--j", type=int, default=0)
    s.add_argument("--D", type=int, default=4)
    _add_run_flags(s)

    s = sub.add_parser("wallcross", parents=[common], help="reduce an explicit class to X")
    _add_surface_flags(s)
    s.add_argument("--rank", type=int, default=2)
    s.add_argument("--c1", default="0")
    s.add_argument("--c2", default="0")
    s.add_argument("--j", type=int, default=0, help="start at p^*c - j e")
    s.add_argument("--start-level", type=int)
    s.add_argument("--integrand", help="extra slant polynomial, e.g. 'nu2^2'")
    _add_run_flags(s)

    s = sub.add_parser("qseries", parents=[common], help="theta and Hilbert scheme series")
    s.add_argument("kind", choices=("za", "goettsche", "ratio"))
    s.add_argument("--a", type=int, default=0)
    s.add_argument("--order", type=int, default=10)
    s.add_argument("--x-spec", type=int, help="specialize x to this value")
    s.add_argument("--z-spec", type=int, help="specialize z (Poincare series)")
    s.add_argument("--chi", type=int)
    s.add_argument("--betti", help="b1,b2,b3,b4")

    s = sub.add_parser("schur", parents=[common], help="Grassmannian integrals, push vs oracle")
    s.add_argument("--j", type=int, default=2)
    s.add_argument("--n", type=int, default=4)
    s.add_argument("--monomial", help="special Schubert indices, e.g. 1,1,1,1")
    return p


def _apply_config(parser: _Parser, argv: List[str]) -> argparse.Namespace:
    args = parser.parse_args(argv)
    if not getattr(args, "config", None):
        return args
    try:
        cfg = load_mapping(args.config)
    except (OSError, ValueError) as exc:
        raise UsageError(f"cannot read config {args.config}: {exc}")
    cfg = {k.replace("-", "_"): v for k, v in cfg.items()}
    sub = parser._subparsers._group_actions[0].choices[args.command]
    known = {a.dest for a in sub._actions}
    unknown = sorted(set(cfg) - known)
    if unknown:
        raise UsageError(f"unknown config keys: {', '.join(unknown)}")
    sub.set_defaults(**cfg)
    return parser.parse_args(argv)    # flags given on the command line still win


def main(argv: Optional[List[str]] = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = _apply_config(parser, argv)
        if not args.command:
            raise UsageError(parser.format_usage().strip())
        logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                            format="%(levelname)s %(name)s: %(message)s")
        obj = COMMANDS[args.command](args)
    except UsageError as exc:
        print(str(exc), file=sys.stderr)
        return 1
    except VerificationError as exc:
        print(f"verification failed: {exc}", file=sys.stderr)
        return 2
    except (EngineError, ConfigurationError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    text = canonical(obj)
    if args.output:
        Path(args.output).write_text(text + "\n")
    print(text if args.format == "json" else render_table(args.command, obj))
    return 0


if __name__ == "__main__":
    sys.exit(main())
