"""
Command-line front end.

    qnormal density   --family fN --q 0.5 --from -2.8 --to 2.8 --points 200
    qnormal moments   --family fQ --a 0.5 --b 0.2 --q 0.3 --max-order 10
    qnormal mgf       --family fCN --y 0.5 --rho 0.6 --q 0.3 --t 1.0
    qnormal verify    [--suite NAME ...] [--tol SCALE]
    qnormal tabulate  --what c-coefficients --n 8 --q 0.4

Exit codes: 0 success, 1 verification failure, 2 usage or parameter error,
3 numerical non-convergence.  Floats are written with 17 significant
digits.  A relative ``--output`` path is resolved against
``$QNORMAL_OUTPUT_DIR`` when that variable is set.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from typing import Optional, Sequence

import numpy as np

from .densities import DistributionSpec, Family, density
from .errors import ConvergenceError
from .moments import mgf_series, moment
from .orthopoly import coefficient_table
from .quadrature import mgf_oracle, moment_oracles
from .qseries import s_polynomials
from . import verification
from .verification import SUITES

__all__ = ["build_parser", "run", "main", "format_float", "OUTPUT_DIR_ENV"]

OUTPUT_DIR_ENV = "QNORMAL_OUTPUT_DIR"

# which optional parameters each family takes
_FAMILY_PARAMS = {
    Family.FH: (),
    Family.FN: (),
    Family.FQ: ("a", "b"),
    Family.FCN: ("y", "rho"),
}


class UsageError(ValueError):
    pass


def format_float(value: float) -> str:
    return "%.17g" % value


def _json_text(obj) -> str:
    # json.dumps would use the shortest repr; floats here keep 17 digits
    if isinstance(obj, dict):
        items = ", ".join(f"{json.dumps(str(k))}: {_json_text(v)}" for k, v in obj.items())
        return "{" + items + "}"
    if isinstance(obj, (list, tuple)):
        return "[" + ", ".join(_json_text(v) for v in obj) + "]"
    if isinstance(obj, bool) or obj is None:
        return json.dumps(obj)
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return format_float(float(obj)) if math.isfinite(obj) else "null"
    return json.dumps(str(obj))


def _csv_text(header: Sequence[str], rows: Sequence[Sequence]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v
                         for v in row])
    return buf.getvalue()


def _table(header: Sequence[str], rows: Sequence[Sequence], fmt: str, meta: dict) -> str:
    if fmt == "csv":
        return _csv_text(header, rows)
    payload = dict(meta)
    payload["rows"] = [dict(zip(header, row)) for row in rows]
    return _json_text(payload) + "\n"


def _spec_from(args) -> DistributionSpec:
    family = Family(args.family)
    allowed = _FAMILY_PARAMS[family]
    for name in ("a", "b", "y", "rho"):
        if getattr(args, name) is not None and name not in allowed:
            raise UsageError(f"--{name} is not a parameter of family {family.value}")
    if args.q is None:
        raise UsageError("--q is required")
    extra = {name: getattr(args, name) for name in allowed if getattr(args, name) is not None}
    return DistributionSpec(family, args.q, **extra)


def _spec_meta(spec: DistributionSpec) -> dict:
    meta = {"family": spec.family.value, "q": spec.q}
    for name in _FAMILY_PARAMS[spec.family]:
        meta[name] = getattr(spec, name)
    return meta


def _require_converged(report, what: str) -> None:
    if not report.converged:
        raise ConvergenceError(
            f"quadrature for {what} did not converge "
            f"(error estimate {report.error_estimate:.3g}, {report.panels} panels)")


def _cmd_density(args) -> tuple[str, int]:
    spec = _spec_from(args)
    if args.points < 1:
        raise UsageError(f"--points must be at least 1, got {args.points}")
    if args.points > 1 and not args.lower < args.upper:
        raise UsageError(f"--from must be below --to, got {args.lower!r} and {args.upper!r}")
    xs = np.linspace(args.lower, args.upper, args.points)
    values = density(spec, xs)
    rows = [(float(x), float(v)) for x, v in zip(xs, values)]
    return _table(("x", "density"), rows, args.format or "csv", _spec_meta(spec)), 0


def _cmd_moments(args) -> tuple[str, int]:
    spec = _spec_from(args)
    if args.max_order < 0:
        raise UsageError(f"--max-order must be nonnegative, got {args.max_order}")
    reports = moment_oracles(spec, args.max_order)
    rows = []
    for n, report in enumerate(reports):
        _require_converged(report, f"moment n={n}")
        closed = moment(spec, n)
        rows.append((n, float(closed), report.value, abs(closed - report.value)))
    header = ("n", "closed_form", "oracle", "abs_diff")
    return _table(header, rows, args.format or "csv", _spec_meta(spec)), 0


def _cmd_mgf(args) -> tuple[str, int]:
    spec = _spec_from(args)
    series = mgf_series(spec, args.t)
    report = mgf_oracle(spec, args.t)
    _require_converged(report, f"the MGF at t={args.t!r}")
    result = {
        "series_value": series.value,
        "oracle_value": report.value,
        "outer_terms": series.outer_terms,
        "inner_terms": series.inner_terms,
    }
    if (args.format or "json") == "csv":
        return _csv_text(list(result), [list(result.values())]), 0
    payload = _spec_meta(spec)
    payload["t"] = args.t
    payload.update(result)
    return _json_text(payload) + "\n", 0


def _cmd_verify(args) -> tuple[str, int]:
    if not args.tol > 0:
        raise UsageError(f"--tol must be positive, got {args.tol!r}")
    suites = SUITES if not args.suite or "all" in args.suite else args.suite
    checks = verification.run(suites, args.tol)
    failed = sum(not c.passed for c in checks)
    header = ("suite", "check", "observed", "expected", "error", "tolerance", "status")
    rows = [(c.suite, c.name, c.observed, c.expected, c.error, c.tolerance,
             "PASS" if c.passed else "FAIL") for c in checks]
    meta = {"checks": len(checks), "failed": failed}
    print(f"{len(checks)} checks, {failed} failed", file=sys.stderr)
    return _table(header, rows, args.format or "csv", meta), 1 if failed else 0


def _cmd_tabulate(args) -> tuple[str, int]:
    if args.n is None or args.n < 0:
        raise UsageError(f"--n must be a nonnegative integer, got {args.n!r}")
    if args.q is None:
        raise UsageError("--q is required")
    if args.what == "c-coefficients":
        table = coefficient_table(args.n, args.q)
        rows = [(m, args.n, float(c)) for m, c in enumerate(table.c)]
        header = ("m", "n", "c")
        meta = {"what": args.what, "n": args.n, "q": args.q}
    else:
        a = 0.0 if args.a is None else args.a
        b = 0.0 if args.b is None else args.b
        values = s_polynomials(args.n, a, b, args.q)
        rows = [(k, float(v)) for k, v in enumerate(values)]
        header = ("n", "s")
        meta = {"what": args.what, "a": a, "b": b, "q": args.q}
    return _table(header, rows, args.format or "csv", meta), 0


def _add_family_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--family", required=True, choices=[f.value for f in Family])
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    p.add_argument("--y", type=float)
    p.add_argument("--rho", type=float)


def _add_output_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--format", choices=("csv", "json"))
    p.add_argument("--output", help=f"output file; relative paths go under ${OUTPUT_DIR_ENV}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qnormal",
        description="q-Normal family densities, moments, MGFs and their verification.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("density", help="tabulate a density on a grid (CSV: x, density)")
    _add_family_flags(p)
    p.add_argument("--from", dest="lower", type=float, required=True)
    p.add_argument("--to", dest="upper", type=float, required=True)
    p.add_argument("--points", type=int, default=101)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_density)

    p = sub.add_parser("moments", help="closed-form moments against the quadrature oracle")
    _add_family_flags(p)
    p.add_argument("--max-order", type=int, default=10)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_moments)

    p = sub.add_parser("mgf", help="Bessel-series MGF against the quadrature oracle")
    _add_family_flags(p)
    p.add_argument("--t", type=float, required=True)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_mgf)

    p = sub.add_parser("verify", help="run the verification suites")
    p.add_argument("--suite", action="append", choices=SUITES + ("all",))
    p.add_argument("--tol", type=float, default=1.0,
                   help="factor applied to every default tolerance")
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_verify)

    p = sub.add_parser("tabulate", help="tabulate c_{m,n}(q) or S_n(a,b|q)")
    p.add_argument("--what", required=True, choices=("c-coefficients", "s-polynomials"))
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--q", type=float, required=True)
    p.add_argument("--a", type=float)
    p.add_argument("--b", type=float)
    _add_output_flags(p)
    p.set_defaults(handler=_cmd_tabulate)
    return parser


def _output_path(path: str) -> str:
    base = os.environ.get(OUTPUT_DIR_ENV)
    if base and not os.path.isabs(path):
        return os.path.join(base, path)
    return path


def run(argv: Optional[Sequence[str]] = None) -> int:
    """Run one command; returns the exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        text, code = args.handler(args)
    except (ConvergenceError, OverflowError, FloatingPointError) as exc:
        print(f"qnormal {args.command}: {exc}", file=sys.stderr)
        return 3
    except (ValueError, TypeError) as exc:
        print(f"qnormal {args.command}: {exc}", file=sys.stderr)
        return 2
    if args.output:
        path = _output_path(args.output)
        try:
            with open(path, "w", newline="") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"qnormal {args.command}: cannot write --output {path!r}: {exc}",
                  file=sys.stderr)
            return 2
    else:
        sys.stdout.write(text)
    return code


def main() -> None:
    sys.exit(run())
