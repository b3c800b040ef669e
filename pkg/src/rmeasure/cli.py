"""Command-line interface.

Subcommands: ``measure``, ``sweep``, ``partitions`` (alias ``shapes``),
``stirling``, ``opcount`` and ``geom``. Tables go to stdout or ``--out``
as CSV (default) or JSON.

Exit codes: 0 success, 2 malformed input, 3 size cap exceeded,
4 non-finite numeric result.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from pathlib import Path

from . import geometric, measures, partitions, stateio, symmetric
from .errors import CapExceededError, NumericError, RMeasureError

EXIT_OK, EXIT_INPUT, EXIT_CAP, EXIT_NUMERIC = 0, 2, 3, 4

FASTPATH_THRESHOLD = 10
"""Symmetric inputs with n <= this go through enumeration unless forced."""

MEASURE_HEADER = ["state_tag", "n", "m", "R_m", "zero_flag"]
SWEEP_HEADER = ["family", "n", "k", "m", "R_m", "zero_flag"]
SHAPES_HEADER = ["n", "m", "shape", "h"]
LIST_HEADER = ["n", "m", "index", "partition"]
STIRLING_HEADER = ["n", "m", "S", "ln_S", "ln_asym_large_n", "ratio_large_n",
                   "ln_asym_small_gap", "ratio_small_gap"]
OPCOUNT_HEADER = ["n", "m", "S", "op_count"]
GEOM_HEADER = ["state_tag", "n", "E_G", "overlap", "restarts_used"]


class UsageError(RMeasureError):
    pass


def fmt(value) -> str:
    """12 significant digits for floats, ``0``/``1`` for flags."""
    if isinstance(value, bool):
        return "1" if value else "0"
    if isinstance(value, float):
        return f"{value:.12g}"
    if value is None:
        return ""
    return str(value)


def parse_range(text: str | None) -> list[int] | None:
    """``"3..8"`` -> [3, ..., 8]; ``"5"`` -> [5]."""
    if text is None:
        return None
    try:
        if ".." in text:
            lo, hi = text.split("..", 1)
            values = list(range(int(lo), int(hi) + 1))
        else:
            values = [int(text)]
    except ValueError:
        raise UsageError(f"bad range {text!r}; use A..B or a single integer") from None
    if not values:
        raise UsageError(f"empty range {text!r}")
    return values


def _check_finite(values) -> None:
    for v in values:
        if isinstance(v, float) and not math.isfinite(v):
            raise NumericError("non-finite value in output")


def emit(args, header, rows, json_payload=None) -> None:
    """Write rows as CSV, or ``json_payload`` (default: row dicts) as JSON."""
    for row in rows:
        _check_finite(row)
    if args.format == "json":
        payload = json_payload if json_payload is not None else [
            dict(zip(header, row)) for row in rows]
        text = json.dumps(payload, indent=2) + "\n"
    else:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([fmt(v) for v in row])
        text = buf.getvalue()
    if args.out:
        Path(args.out).write_text(text)
    else:
        sys.stdout.write(text)


def _state_description(args) -> dict:
    if bool(args.state) == bool(args.builtin):
        raise UsageError("give exactly one of --state FILE or --builtin NAME[:params]")
    obj = stateio.load_state_file(args.state) if args.state else stateio.parse_builtin(args.builtin)
    if args.tag:
        obj = dict(obj, tag=args.tag)
    return obj


def _select_ms(n: int, requested) -> list[int]:
    ms = list(range(2, n + 1)) if requested is None else requested
    bad = [m for m in ms if not 2 <= m <= n]
    if bad:
        raise UsageError(f"m values {bad} outside 2..{n}")
    return ms


def cmd_measure(args) -> int:
    obj = _state_description(args)
    tag = stateio.describe(obj)
    n = stateio.state_qubits(obj)
    if n < 2:
        raise UsageError("R_m needs at least two qubits")
    ms = _select_ms(n, parse_range(args.m))
    family = stateio.symmetric_family(obj)
    path = args.force_path

    if path is None:
        if n <= FASTPATH_THRESHOLD:
            path = "generic"
        elif family is not None:
            path = "symmetric"
        else:
            psi = stateio.build_state(obj)
            path = "symmetric" if symmetric.is_symmetric(psi) else "generic"

    if path == "symmetric":
        if family is not None:
            fam, fn, k = family
            profile = symmetric.family_profile(fam, fn, k, args.eps_sep)
        else:
            profile = symmetric.eta_profile_from_state(stateio.build_state(obj), args.eps_sep)
        report = symmetric.symmetric_report(profile, ms, tag=tag)
    else:
        psi = stateio.build_state(obj)
        report = measures.r_all(psi, args.eps_sep, ms, workers=args.workers, tag=tag)
    report.eps_sep = args.eps_sep

    rows = report.rows()
    payload = {
        "state_tag": tag, "n": n, "path": report.path, "eps_sep": args.eps_sep,
        "values": {str(m): v for m, v in report.values.items()},
        "zero_flags": {str(m): f for m, f in report.zero_flags.items()},
        "per_shape": [{"m": m, "shape": list(shape), "count": count, "xi": x}
                      for (m, shape), (count, x) in sorted(report.per_shape.items())],
    }
    _check_finite(x for _, x in report.per_shape.values())
    emit(args, MEASURE_HEADER, rows, payload)
    return EXIT_OK


def cmd_sweep(args) -> int:
    ns = parse_range(args.n)
    if args.family == "dicke" and args.k is None:
        raise UsageError("--family dicke needs --k")
    k = args.k or 0
    if min(ns) < 2 or (args.family == "dicke" and min(ns) < k):
        raise UsageError("every n must be >= 2 (and >= k for dicke)")
    if max(ns) > partitions.STIRLING_MAX_N:
        raise CapExceededError(f"sweep limited to n <= {partitions.STIRLING_MAX_N}")
    rows = symmetric.sweep(args.family, ns, parse_range(args.m), k, args.eps_sep)
    emit(args, SWEEP_HEADER, rows)
    return EXIT_OK


def _nm_grid(args, default_m_lo: int = 1):
    ns = parse_range(args.n)
    req = parse_range(args.m)
    for n in ns:
        if n < 1:
            raise UsageError("n must be positive")
        for m in (req if req is not None else range(default_m_lo, n + 1)):
            if 1 <= m <= n:
                yield n, m


def cmd_partitions(args) -> int:
    rows = []
    if args.list:
        header = LIST_HEADER
        for n, m in _nm_grid(args):
            if n > measures.GENERIC_CAP:
                raise CapExceededError(f"listing limited to n <= {measures.GENERIC_CAP}")
            for i, p in enumerate(partitions.enumerate_set_partitions(n, m)):
                rows.append((n, m, i, str(p)))
    else:
        header = SHAPES_HEADER
        for n, m in _nm_grid(args):
            if n > partitions.STIRLING_MAX_N:
                raise CapExceededError(f"shapes limited to n <= {partitions.STIRLING_MAX_N}")
            for shape in partitions.iter_shapes(n, m):
                rows.append((n, m, "{" + ",".join(map(str, shape)) + "}",
                             partitions.multiplicity(shape)))
    emit(args, header, rows)
    return EXIT_OK


def cmd_stirling(args) -> int:
    rows = []
    for n, m in _nm_grid(args):
        s = partitions.stirling2(n, m)
        ln_s = math.log(s)
        large = partitions.stirling_asym_large_n(n, m) if m < n else None
        small = partitions.stirling_asym_small_gap(n, n - m)
        rows.append((n, m, s, ln_s, large,
                     math.exp(ln_s - large) if large is not None else None,
                     small, math.exp(ln_s - small)))
    emit(args, STIRLING_HEADER, rows)
    return EXIT_OK


def cmd_opcount(args) -> int:
    rows = [(n, m, partitions.stirling2(n, m), partitions.op_count_estimate(n, m))
            for n, m in _nm_grid(args)]
    emit(args, OPCOUNT_HEADER, rows)
    return EXIT_OK


def cmd_geom(args) -> int:
    obj = _state_description(args)
    tag = stateio.describe(obj)
    psi = stateio.build_state(obj)
    res = geometric.eg_optimize(psi, restarts=args.restarts, tol=args.tol,
                                seed=args.seed, symmetric=args.symmetric)
    rows = [(tag, psi.n, res.value, res.overlap, res.restarts)]
    payload = [dict(zip(GEOM_HEADER, rows[0]), ansatz=res.ansatz.to_dict(),
                    sweeps=res.sweeps)]
    if args.angles_out:
        Path(args.angles_out).write_text(json.dumps(res.ansatz.to_dict(), indent=2) + "\n")
    emit(args, GEOM_HEADER, rows, payload)
    return EXIT_OK


def _add_output(p) -> None:
    p.add_argument("--format", choices=["csv", "json"], default="csv")
    p.add_argument("--out", metavar="PATH", help="write here instead of stdout")


def _add_state(p) -> None:
    p.add_argument("--state", metavar="FILE", help="JSON state file")
    p.add_argument("--builtin", metavar="NAME[:params]",
                   help="ghz:N, w:N, dicke:N,K, zero:N; join factors with '*'")
    p.add_argument("--tag", help="row label (default derived from the state)")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rmeasure",
        description="Intermediate-separability entanglement measures R_m for n-qubit pure states.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("measure", help="R_m of one state")
    _add_state(p)
    p.add_argument("--m", metavar="A..B", help="block counts (default 2..n)")
    p.add_argument("--eps-sep", type=float, default=measures.EPS_SEP)
    p.add_argument("--force-path", choices=["generic", "symmetric"])
    p.add_argument("--workers", type=int, default=os.cpu_count() or 1)
    _add_output(p)
    p.set_defaults(func=cmd_measure)

    p = sub.add_parser("sweep", help="R_m over an (n, m) grid for GHZ, W or Dicke states")
    p.add_argument("--family", choices=symmetric.FAMILIES, required=True)
    p.add_argument("--n", metavar="A..B", required=True)
    p.add_argument("--m", metavar="A..B", help="block counts (default 2..n per n)")
    p.add_argument("--k", type=int, help="excitations for --family dicke")
    p.add_argument("--eps-sep", type=float, default=measures.EPS_SEP)
    _add_output(p)
    p.set_defaults(func=cmd_sweep)

    for name in ("partitions", "shapes"):
        p = sub.add_parser(name, help="partition shapes with multiplicities")
        p.add_argument("--n", metavar="A..B", required=True)
        p.add_argument("--m", metavar="A..B")
        p.add_argument("--list", action="store_true", help="list every set partition")
        _add_output(p)
        p.set_defaults(func=cmd_partitions)

    p = sub.add_parser("stirling", help="exact and asymptotic Stirling numbers")
    p.add_argument("--n", metavar="A..B", required=True)
    p.add_argument("--m", metavar="A..B")
    _add_output(p)
    p.set_defaults(func=cmd_stirling)

    p = sub.add_parser("opcount", help="m * S(n, m) assembly cost")
    p.add_argument("--n", metavar="A..B", required=True)
    p.add_argument("--m", metavar="A..B")
    _add_output(p)
    p.set_defaults(func=cmd_opcount)

    p = sub.add_parser("geom", help="geometric measure of entanglement")
    _add_state(p)
    p.add_argument("--restarts", type=int, default=32)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--symmetric", action="store_true",
                   help="restrict to identical single-qubit factors")
    p.add_argument("--angles-out", metavar="PATH", help="write the maximizing angles as JSON")
    _add_output(p)
    p.set_defaults(func=cmd_geom)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "eps_sep", 1.0) <= 0:
        parser.error("--eps-sep must be positive")
    if getattr(args, "workers", 1) < 1:
        parser.error("--workers must be >= 1")
    try:
        return args.func(args)
    except CapExceededError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except RMeasureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    except (NumericError, FloatingPointError, OverflowError) as exc:
        print(f"numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
