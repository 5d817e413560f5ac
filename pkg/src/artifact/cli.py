"""Command-line front end: ``artifact <command> [flags]``.

Every run writes one report envelope (JSON by default, CSV for tabular scans)
and exits 0 on success, 1 on usage errors, 2 on domain errors, 3 on resource
limits and 4 on numerical failures (including failed self-test checks).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import time
from datetime import datetime, timezone
from fractions import Fraction
from typing import Any, Callable, Sequence

from . import __version__, cache
from .errors import ArtifactError, NumericalFailure
from .parallel import set_workers

EXIT_USAGE = 1


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _vector(text: str) -> tuple[int, ...]:
    from .forms import parse_vector

    try:
        return parse_vector(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer vector: {text!r}") from exc


def _interval(text: str) -> tuple[float, float]:
    parts = text.split(",")
    if len(parts) != 2:
        raise argparse.ArgumentTypeError("interval must be lo,hi")
    return float(parts[0]), float(parts[1])


def _form(args):
    from .forms import DiagonalCubicForm

    if args.F is not None:
        return DiagonalCubicForm(args.F)
    return DiagonalCubicForm.fermat(args.fermat)


def _add_form(p: argparse.ArgumentParser, required_c: bool = False) -> None:
    g = p.add_mutually_exclusive_group(required=True)
    g.add_argument("--F", type=_vector, help="coefficients F_1,...,F_m")
    g.add_argument("--fermat", type=int, help="use F = x_1^3 + ... + x_m^3")
    if required_c:
        p.add_argument("--c", type=_vector, required=True, help="dual vector c_1,...,c_m")


def _jsonable(x: Any) -> Any:
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, dict):
        return {str(k): _jsonable(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_jsonable(v) for v in x]
    if isinstance(x, float) and not math.isfinite(x):
        return str(x)
    if hasattr(x, "item"):
        return x.item()
    return x


# ----------------------------------------------------------------- commands


def cmd_expsum(args) -> dict:
    from .exactnum import factorize
    from .expsums import expsum

    F = _form(args)
    val = expsum(F, args.c, args.n, engine=args.engine)
    return {
        "F": list(F.coeffs),
        "c": list(args.c),
        "n": args.n,
        "S": val.value,
        "S_normalized": float(val),
        "S_normalized_exact": str(val.normalized),
        "factorization": str(factorize(args.n)) if args.n > 1 else "1",
    }


def cmd_disc(args) -> dict:
    from .exactnum import factorize
    from .forms import disc_delta, is_singular_c

    F = _form(args)
    d = disc_delta(F, args.c, norm=args.norm)
    out = {"F": list(F.coeffs), "c": list(args.c), "norm": args.norm, "delta": str(d), "singular": d == 0}
    if args.factor and d != 0:
        f = factorize(d)
        out["factorization"] = str(f)
        out["factors"] = [[p, e] for p, e in f.factors]
    out["dual_vanishes"] = is_singular_c(F, args.c)
    return out


def cmd_zeta(args) -> dict:
    from .zeta import charpoly_factor, frobenius_charpoly, weil_report

    F = _form(args)
    data = frobenius_charpoly(F, args.c, args.p, depth=args.depth, method=args.method)
    out = data.to_json()
    if data.complete:
        out["factors"] = [[str(f), e] for f, e in charpoly_factor(data)]
        out["weil"] = weil_report(data)
    return out


def cmd_dirichlet_stat(args) -> dict:
    from .dirichlet import DeletedBox, dyadic_moment_stat, second_moment_stat, second_moment_trend

    F = _form(args)
    Y = args.Y if args.Y is not None else args.N / args.beta  # smallest Y with N <= beta Y
    if args.kind == "second-moment-trend":
        return second_moment_trend(F, args.Z, Y, args.N, choice=args.choice)
    if args.kind == "second-moment":
        lo, hi = args.I if args.I else (args.N / 2, 2 * args.N)
        rep = second_moment_stat(F, args.Z, Y, args.N, (lo, hi), choice=args.choice, beta=args.beta)
    elif args.kind in ("abs-a'", "abs-b"):
        idx = tuple(args.indices) if args.indices else tuple(range(F.m))
        rep = dyadic_moment_stat(args.kind, F, DeletedBox(idx, args.Z, F.m), args.N, choice=args.choice)
    else:
        rep = dyadic_moment_stat("bad-sum", F, args.Z, args.N, include_one=not args.exclude_one)
    return rep.to_json()


def cmd_sieve_norm(args) -> dict:
    from .dirichlet import large_sieve_norm

    rep = large_sieve_norm(_form(args), args.Z, args.Q, gamma=args.gamma, choice=args.choice, Y=args.Y)
    return rep.to_json()


def cmd_delta_verify(args) -> dict:
    from .delta import DeltaParams, SmoothWeight, delta_identity_report, real_density

    F = _form(args)
    w = SmoothWeight(args.a, args.b)
    params = DeltaParams(args.X, c_mult=args.c_mult)
    rep = delta_identity_report(F, w, params, check_tail=not args.no_tail)
    out = rep.to_json()
    out["sigma_infinity"] = real_density(F, w)
    return out


def cmd_singular_series(args) -> dict:
    from .delta import singular_series

    return singular_series(_form(args), args.N).to_json()


def cmd_lab_ternary(args) -> dict | list[dict]:
    from .lab import TernaryInstance, ternary_conjecture_scan, ternary_count

    if args.scan:
        rep, rows = ternary_conjecture_scan(args.H, args.X, args.samples, seed=args.seed, k_mode=args.k_mode)
        return {"report": rep.to_json(), "rows": rows}
    if args.h is None or args.k is None:
        raise argparse.ArgumentTypeError("--h and --k are required without --scan")
    inst = TernaryInstance(tuple(args.h), args.k, args.X)
    return {"h": list(args.h), "k": args.k, "X": args.X, "count": ternary_count(args.h, args.k, args.X), "admissible": inst.admissible}


def cmd_lab_square_locus(args) -> dict:
    from .lab import loglog_slope, square_locus_count

    out = {"H": args.H, "count": square_locus_count(args.H)}
    if args.slope:
        Hs = [args.H // 4, args.H // 2, args.H]
        Hs = [h for h in Hs if h >= 1]
        counts = [square_locus_count(h) for h in Hs]
        out["slope_points"] = list(zip(Hs, counts))
        out["loglog_slope"] = loglog_slope(Hs, counts) if len(Hs) > 1 else None
    return out


def cmd_lab_vdc(args) -> dict:
    import random

    from .lab import DifferencingConfig, vdc_identity_check, vdc_identity_symbolic, vdc_keypoint_check

    rng = random.Random(args.seed)
    fails = 0
    for _ in range(args.fuzz):
        hp = [rng.randint(-100, 100) for _ in range(3)]
        y = [rng.randint(-100, 100) for _ in range(3)]
        fails += not vdc_identity_check(hp, y)
    key = vdc_keypoint_check(DifferencingConfig(args.X, args.theta, args.c), args.samples, seed=args.seed)
    return {"fuzz_samples": args.fuzz, "identity_failures": fails, "symbolic": vdc_identity_symbolic(), "keypoint": key}


def cmd_lab_jutila(args) -> dict:
    from .lab import jutila_covering_ratio

    filt = ("smooth", args.smooth) if args.smooth is not None else "all"
    return jutila_covering_ratio(args.Y, filt, Fraction(args.A).limit_denominator(10**6)).to_json()


def cmd_lab_phi_search(args) -> dict:
    from .lab import phi_divisibility_search

    # --limit is the largest n tested
    tested, found = phi_divisibility_search(args.limit + 1, args.dmax, args.mult)
    return {"max_tested": tested, "max_discovered": found}


def cmd_selftest(args) -> dict:
    from .selftest import run_selftest

    summary = run_selftest(args.level)
    if not summary["ok"]:
        raise _SelftestFailed(summary)
    return summary


class _SelftestFailed(NumericalFailure):
    def __init__(self, summary: dict):
        super().__init__("self-test failed")
        self.summary = summary


COMMANDS: dict[str, Callable] = {
    "expsum": cmd_expsum,
    "disc": cmd_disc,
    "zeta": cmd_zeta,
    "dirichlet-stat": cmd_dirichlet_stat,
    "sieve-norm": cmd_sieve_norm,
    "delta-verify": cmd_delta_verify,
    "singular-series": cmd_singular_series,
    "lab-ternary": cmd_lab_ternary,
    "lab-square-locus": cmd_lab_square_locus,
    "lab-vdc": cmd_lab_vdc,
    "lab-jutila": cmd_lab_jutila,
    "lab-phi-search": cmd_lab_phi_search,
    "selftest": cmd_selftest,
}


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="artifact", allow_abbrev=False, description="Exact and numerical experiments for diagonal cubic forms.")
    parser.add_argument("--version", action="version", version=f"artifact {__version__}")
    common = argparse.ArgumentParser(add_help=False, allow_abbrev=False)
    common.add_argument("--out", help="output path (default: stdout)")
    common.add_argument("--format", choices=("json", "csv"), default="json")
    common.add_argument("--cache-dir", help="cache directory (default: $ARTIFACT_CACHE_DIR or ~/.cache/artifact)")
    common.add_argument("--no-cache", action="store_true")
    common.add_argument("--threads", type=int, default=1, help="worker count (reductions are ordered)")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("expsum", parents=[common], allow_abbrev=False, help="S_c(n)")
    _add_form(p, required_c=True)
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--engine", choices=("auto", "modular", "cyclotomic"), default="auto")

    p = sub.add_parser("disc", parents=[common], allow_abbrev=False, help="Delta(F, c)")
    _add_form(p, required_c=True)
    p.add_argument("--norm", choices=("definition", "appendix-code"), default="definition")
    p.add_argument("--factor", action="store_true")

    p = sub.add_parser("zeta", parents=[common], allow_abbrev=False, help="Frobenius polynomial of a section")
    _add_form(p, required_c=True)
    p.add_argument("--p", type=int, required=True)
    p.add_argument("--depth", type=int)
    p.add_argument("--method", choices=("auto", "character", "pivot", "convolution"), default="auto")

    p = sub.add_parser("dirichlet-stat", parents=[common], allow_abbrev=False, help="second-moment and dyadic statistics")
    _add_form(p)
    p.add_argument("--kind", choices=("second-moment", "second-moment-trend", "abs-a'", "abs-b", "bad-sum"), default="second-moment")
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--Y", type=float, default=None)
    p.add_argument("--N", type=float, required=True)
    p.add_argument("--I", type=_interval, help="interval lo,hi inside [N/2, 2N]")
    p.add_argument("--choice", type=int, choices=(1, 2, 3), default=2)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--indices", type=_vector, help="deleted-box support (0-based)")
    p.add_argument("--exclude-one", action="store_true", help="bad-sum: drop n = 1")

    p = sub.add_parser("sieve-norm", parents=[common], allow_abbrev=False, help="large-sieve operator norm")
    _add_form(p)
    p.add_argument("--Z", type=int, required=True)
    p.add_argument("--Q", type=int, required=True)
    p.add_argument("--Y", type=float)
    p.add_argument("--gamma", choices=("sqfree-a", "b"), default="sqfree-a")
    p.add_argument("--choice", type=int, choices=(1, 2, 3), default=2)

    p = sub.add_parser("delta-verify", parents=[common], allow_abbrev=False, help="both sides of the delta-method identity")
    _add_form(p)
    p.add_argument("--X", type=float, required=True)
    p.add_argument("--a", type=float, default=0.3, help="inner radius of the weight")
    p.add_argument("--b", type=float, default=1.0, help="outer radius of the weight")
    p.add_argument("--c-mult", type=float, default=100.0)
    p.add_argument("--no-tail", action="store_true")

    p = sub.add_parser("singular-series", parents=[common], allow_abbrev=False, help="partial sums of the singular series")
    _add_form(p)
    p.add_argument("--N", type=int, required=True)

    p = sub.add_parser("lab-ternary", parents=[common], allow_abbrev=False, help="ternary quadratic counts and scans")
    p.add_argument("--h", type=_vector)
    p.add_argument("--k", type=int)
    p.add_argument("--X", type=int, required=True)
    p.add_argument("--scan", action="store_true")
    p.add_argument("--H", type=int, default=10)
    p.add_argument("--samples", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--k-mode", choices=("cubic", "uniform"), default="cubic")

    p = sub.add_parser("lab-square-locus", parents=[common], allow_abbrev=False, help="the square-locus count")
    p.add_argument("--H", type=int, required=True)
    p.add_argument("--slope", action="store_true")

    p = sub.add_parser("lab-vdc", parents=[common], allow_abbrev=False, help="differencing identity and key-point filter")
    p.add_argument("--X", type=int, default=1000)
    p.add_argument("--theta", type=float, default=10 / 13)
    p.add_argument("--c", type=float, default=0.01)
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--fuzz", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("lab-jutila", parents=[common], allow_abbrev=False, help="covering efficiency ratio")
    p.add_argument("--Y", type=int, required=True)
    p.add_argument("--A", type=float, default=4.0)
    p.add_argument("--smooth", type=float, help="keep only B-smooth moduli")

    p = sub.add_parser("lab-phi-search", parents=[common], allow_abbrev=False, help="totient divisibility search")
    p.add_argument("--limit", type=int, required=True, help="largest n tested")
    p.add_argument("--dmax", type=int, default=9)
    p.add_argument("--mult", type=int, default=10)

    p = sub.add_parser("selftest", parents=[common], allow_abbrev=False, help="run the invariant batteries")
    p.add_argument("--level", choices=("fast", "full"), default="fast")
    return parser


def _to_csv(payload: Any) -> str:
    rows = payload.get("rows") if isinstance(payload, dict) and "rows" in payload else payload
    if isinstance(rows, dict):
        rows = [rows]
    flat = []
    for r in rows:
        flat.append({k: json.dumps(_jsonable(v)) if isinstance(v, (list, dict)) else v for k, v in r.items()})
    keys = list(dict.fromkeys(k for r in flat for k in r))
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=keys, lineterminator="\n")
    w.writeheader()
    w.writerows(flat)
    return buf.getvalue()


def run(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cache_dir:
        os.environ[cache.CACHE_ENV] = args.cache_dir
    cache.set_enabled(not args.no_cache)
    set_workers(args.threads)
    started = datetime.now(timezone.utc).isoformat()
    t0 = time.perf_counter()
    config = {k: _jsonable(v) for k, v in vars(args).items() if k not in ("out",)}
    envelope: dict[str, Any] = {"tool": "artifact", "version": __version__, "command": args.command, "config": config}
    code = 0
    try:
        result = COMMANDS[args.command](args)
        envelope["result"] = _jsonable(result)
    except _SelftestFailed as exc:
        envelope["result"] = _jsonable(exc.summary)
        envelope["error"] = {"type": "SelftestFailed", "message": str(exc)}
        code = exc.exit_code
    except ArtifactError as exc:
        envelope["error"] = {"type": type(exc).__name__, "message": str(exc)}
        code = exc.exit_code
    except argparse.ArgumentTypeError as exc:
        parser.print_usage(sys.stderr)
        print(f"artifact: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    envelope["started"] = started
    envelope["elapsed_seconds"] = time.perf_counter() - t0
    envelope["provenance"] = {"cache_dir": str(cache.cache_root()), "cache_enabled": not args.no_cache}
    if args.format == "csv" and "result" in envelope:
        text = _to_csv(envelope["result"])
    else:
        text = json.dumps(envelope, indent=2, sort_keys=False) + "\n"
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    if "error" in envelope:
        print(f"artifact: {envelope['error']['type']}: {envelope['error']['message']}", file=sys.stderr)
    return code


def main() -> None:
    sys.exit(run())
