"""Command-line driver: ``nikolskii <subcommand> ...``.

Every subcommand writes one JSON document or one CSV table, to stdout or
``--out``. Floats are printed with 17 significant digits. Exit codes:
0 success, 1 usage or contract error, 2 result is only a lower bound
(p < 1 or optimizer not stationary), 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
import sys
from pathlib import Path

import numpy as np

from .constants import (
    exact_constant_nonneg,
    exact_constant_p2,
    limit_constant_nonneg,
    limit_constant_p2,
)
from .designs import mz_ratio, read_nodes, verify_design
from .errors import DomainError, NumericError
from .extrapolation import SOURCES, estimate_limit
from .kernel import KernelProfile, localization_sweep, scaling_sweep
from .quadrature import gauss_jacobi, gauss_radau_jacobi
from .special import JacobiBasis
from .zonal import OptimizeOptions, optimize_zonal_constant

EXIT_OK, EXIT_USAGE, EXIT_LOWER_BOUND, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _fmt(x: float) -> str:
    if math.isnan(x):
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON with every float at 17 significant digits and sorted keys."""
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (float, np.floating)):
        return _fmt(float(obj))
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in sorted(obj.items())]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple, np.ndarray)):
        if len(obj) == 0:
            return "[]"
        items = [f"{pad}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def _csv(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in rows:
        w.writerow([_fmt(v).strip('"') if isinstance(v, float) else v for v in row])
    return buf.getvalue()


def _int_range(text: str) -> list[int]:
    """``"3"``, ``"1,2,5"`` or the inclusive range ``"0:20"``."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if not part:
            continue
        if ":" in part:
            lo, hi = part.split(":", 1)
            out.extend(range(int(lo), int(hi) + 1))
        else:
            out.append(int(part))
    return out


def _emit(args, text: str) -> None:
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_constants(args) -> int:
    rows = []
    for d in _int_range(args.dim):
        lp2, lnn = limit_constant_p2(d).value, limit_constant_nonneg(d).value
        for n in _int_range(args.degree):
            rows.append({
                "n": n, "d": d,
                "exact_p2": exact_constant_p2(n, d).value,
                "exact_nonneg": exact_constant_nonneg(n, d).value,
                "limit_p2": lp2,
                "limit_nonneg": lnn,
            })
    if args.format == "csv":
        keys = ["n", "d", "exact_p2", "exact_nonneg", "limit_p2", "limit_nonneg"]
        _emit(args, _csv(keys, [[r[k] for k in keys] for r in rows]))
    else:
        _emit(args, dumps({"command": "constants", "rows": rows}) + "\n")
    return EXIT_OK


def _opts(args) -> OptimizeOptions:
    return OptimizeOptions(grad_tol=args.tol, max_iter=args.max_iter, starts=args.starts, seed=args.seed)


def cmd_optimize(args) -> int:
    est = optimize_zonal_constant(args.degree, args.dim, args.p, _opts(args))
    _emit(args, dumps({"command": "optimize", "estimate": est.to_dict()}) + "\n")
    return EXIT_OK if est.meta["converged"] and args.p >= 1 else EXIT_LOWER_BOUND


def cmd_limit(args) -> int:
    degrees = _int_range(args.degree)
    est = estimate_limit(args.dim, args.p, degrees, _opts(args), source=args.source)
    _emit(args, dumps({"command": "limit", "estimate": est.to_dict()}) + "\n")
    return EXIT_OK


def _random_pairs(d: int, count: int, radius: float, seed: int):
    rng = np.random.default_rng(seed)
    pairs = []
    for _ in range(count):
        pt = []
        for _ in range(2):
            v = rng.standard_normal(d)
            v *= radius * rng.uniform() ** (1 / d) / np.linalg.norm(v)
            pt.append(v)
        pairs.append(tuple(pt))
    return pairs


def cmd_kernel(args) -> int:
    profile = KernelProfile(args.eps, args.variant)
    ns = _int_range(args.degree)
    if args.mode == "localization":
        ells = [float(v) for v in args.ell.split(",")]
        rows = localization_sweep(ns, args.dim, profile, ells)
        header = ["n", "ell", "empirical_constant"]
        records = [dict(zip(header, r)) for r in rows]
    else:
        pairs = _random_pairs(args.dim, args.pairs, args.radius, args.seed)
        rows = scaling_sweep(ns, args.dim, profile, pairs)
        header = ["n", "x", "y", "residual"]
        rows = [(n, " ".join(_fmt(v) for v in x), " ".join(_fmt(v) for v in y), r) for n, x, y, r in rows]
        records = [{"n": n, "x": [float(v) for v in x.split()], "y": [float(v) for v in y.split()], "residual": r}
                   for n, x, y, r in rows]
    if args.format == "json":
        _emit(args, dumps({"command": "kernel", "mode": args.mode, "eps": args.eps,
                           "variant": args.variant, "d": args.dim, "rows": records}) + "\n")
    else:
        _emit(args, _csv(header, rows))
    return EXIT_OK


def cmd_design(args) -> int:
    nodes = read_nodes(Path(args.file))
    report = verify_design(nodes, args.degree, args.tol, probes=args.probes, seed=args.seed)
    doc = {"command": "design", "report": report.to_dict()}
    if args.p is not None:
        lo, hi = mz_ratio(nodes, args.mz_degree, args.p, args.trials, seed=args.seed,
                          certified_degree=report.certified_degree)
        doc["mz"] = {"n": args.mz_degree, "p": args.p, "min_ratio": lo, "max_ratio": hi}
    _emit(args, dumps(doc) + "\n")
    return EXIT_OK


def cmd_quadrature(args) -> int:
    if args.dim is not None:
        basis = JacobiBasis.zonal(args.dim)
    else:
        basis = JacobiBasis(args.alpha, args.beta)
    rule = (gauss_radau_jacobi if args.kind == "radau" else gauss_jacobi)(args.degree, basis)
    if args.format == "csv":
        _emit(args, rule.to_csv())
    else:
        _emit(args, dumps({
            "command": "quadrature", "kind": args.kind, "alpha": basis.alpha, "beta": basis.beta,
            "exactness_degree": rule.exactness_degree,
            "nodes": rule.nodes.tolist(), "weights": rule.weights.tolist(),
        }) + "\n")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="nikolskii", description="Sharp Nikolskii constants on the sphere.")
    parser.add_argument("--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, fmt=("json",)):
        p.add_argument("--out", help="write output here instead of stdout")
        p.add_argument("--format", choices=fmt, default=fmt[0])

    def opt_flags(p):
        p.add_argument("--tol", type=float, default=1e-9, help="stationarity tolerance")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--starts", type=int, default=4, help="seeds tried when p < 1")
        p.add_argument("--max-iter", type=int, default=200)

    p = sub.add_parser("constants", help="closed-form constants over (n, d) ranges")
    p.add_argument("--degree", default="0:10", help="degrees: '5', '1,2,4' or inclusive '0:20'")
    p.add_argument("--dim", default="1:4", help="dimensions, same syntax as --degree")
    common(p, ("json", "csv"))
    p.set_defaults(func=cmd_constants)

    p = sub.add_parser("optimize", help="zonal lower bound for C(n, d, p, inf)")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    opt_flags(p)
    common(p)
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("limit", help="extrapolate C(n, d, p, inf) / n^(d/p)")
    p.add_argument("--degree", default="8,16,32,64", help="at least three increasing degrees")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--p", type=float, required=True)
    p.add_argument("--source", choices=SOURCES, default="optimize")
    opt_flags(p)
    common(p)
    p.set_defaults(func=cmd_limit)

    p = sub.add_parser("kernel", help="scaling-limit or localization sweep of the smoothed kernel")
    p.add_argument("--degree", default="32,64,128,256")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--eps", type=float, default=0.25)
    p.add_argument("--variant", choices=("lower", "upper"), default="lower")
    p.add_argument("--mode", choices=("scaling", "localization"), default="scaling")
    p.add_argument("--pairs", type=int, default=20)
    p.add_argument("--radius", type=float, default=5.0)
    p.add_argument("--ell", default="1,2,3")
    p.add_argument("--seed", type=int, default=0)
    common(p, ("csv", "json"))
    p.set_defaults(func=cmd_kernel)

    p = sub.add_parser("design", help="certify a node-set file")
    p.add_argument("file")
    p.add_argument("--degree", type=int, required=True, help="highest design degree to test")
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--p", type=float, default=None, help="also report MZ ratios for this p")
    p.add_argument("--mz-degree", type=int, default=1)
    p.add_argument("--trials", type=int, default=20)
    p.add_argument("--probes", type=int, default=100_000)
    p.add_argument("--seed", type=int, default=0)
    common(p)
    p.set_defaults(func=cmd_design)

    p = sub.add_parser("quadrature", help="dump a Gauss or Radau rule")
    p.add_argument("--kind", choices=("gauss", "radau"), default="gauss")
    p.add_argument("--degree", type=int, required=True, help="number of free nodes N")
    p.add_argument("--dim", type=int, default=None, help="use the zonal weight of S^d")
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=0.0)
    common(p, ("csv", "json"))
    p.set_defaults(func=cmd_quadrature)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(f"nikolskii: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR, format="%(name)s: %(message)s")
    try:
        return args.func(args)
    except (DomainError, ValueError, OverflowError) as exc:
        print(f"nikolskii: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (NumericError, ArithmeticError, np.linalg.LinAlgError) as exc:
        print(f"nikolskii: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
