"""Command-line front end: ``runprob compute|table|roots|verify``.

Exit codes: 0 success, 1 verification failure, 2 domain/usage error,
3 the chosen method refused the query (the message names a fallback).
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import asdict, dataclass, fields
from typing import List, Optional

from . import exact, numeric, oracle
from .core import (
    CapExceededError,
    ConvergenceError,
    DegenerateKernelError,
    DomainError,
    DominanceError,
    IllConditionedError,
    Method,
    MethodResult,
    Mode,
    RunQuery,
    format_rational,
    to_rational,
)
from .verify import run_verify

CSV_HEADER = ["n", "r", "p", "z_exact", "z_float", "y_float", "method", "error_bound"]

EXIT_OK = 0
EXIT_VERIFY_FAILED = 1
EXIT_DOMAIN = 2
EXIT_REFUSED = 3


def format_float(x: float) -> str:
    return format(float(x), ".17g")


@dataclass(frozen=True)
class OutputRecord:
    n: int
    r: int
    p: str
    z_exact: str
    z_float: str
    y_float: str
    method: str
    error_bound: str

    @classmethod
    def from_result(cls, query: RunQuery, result: MethodResult) -> "OutputRecord":
        return cls(
            n=query.n,
            r=query.r,
            p=format_rational(query.p),
            z_exact=format_rational(result.z) if result.mode is Mode.EXACT else "",
            z_float=format_float(result.z_float),
            y_float=format_float(result.y_float),
            method=result.method.value,
            error_bound="" if result.error_bound is None else format_float(result.error_bound),
        )

    def to_json_obj(self) -> dict:
        return asdict(self)

    @classmethod
    def from_json_obj(cls, obj: dict) -> "OutputRecord":
        return cls(**{f.name: (int(obj[f.name]) if f.name in ("n", "r") else str(obj[f.name])) for f in fields(cls)})

    def to_csv_row(self) -> List[str]:
        return [str(getattr(self, name)) for name in CSV_HEADER]

    @classmethod
    def from_csv_row(cls, row) -> "OutputRecord":
        values = dict(zip(CSV_HEADER, row))
        return cls.from_json_obj(values)

    def to_text(self) -> str:
        lines = [f"p = {self.p}, r = {self.r}, n = {self.n}  [{self.method}]"]
        if self.z_exact:
            lines.append(f"  z (no run)  = {self.z_exact}")
        lines.append(f"  z (float)   = {self.z_float}")
        lines.append(f"  y (run)     = {self.y_float}")
        if self.error_bound:
            lines.append(f"  error bound = {self.error_bound}")
        return "\n".join(lines)


def records_to_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        writer.writerow(rec.to_csv_row())
    return buf.getvalue()


def records_from_csv(text: str) -> List[OutputRecord]:
    rows = list(csv.reader(io.StringIO(text)))
    if not rows or rows[0] != CSV_HEADER:
        raise ValueError("missing or malformed CSV header")
    return [OutputRecord.from_csv_row(row) for row in rows[1:]]


def records_to_json(records) -> str:
    return "[\n" + ",\n".join(json.dumps(rec.to_json_obj()) for rec in records) + "\n]\n"


def _emit(text: str):
    sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _fail(code: int, message: str) -> int:
    print(f"runprob: {message}", file=sys.stderr)
    return code


METHODS = {
    "exact": Method.CLOSED_FORM,
    "recurrence": Method.RECURRENCE,
    "series": Method.SERIES,
    "spectral": Method.SPECTRAL,
    "asymptotic": Method.ASYMPTOTIC,
    "matrix": Method.MATRIX_POWER,
    "brute": Method.BRUTE_FORCE,
    "mc": Method.MONTE_CARLO,
}


def compute_result(query: RunQuery, method: str, trials: int = 10**6, seed: int = 42) -> MethodResult:
    m = METHODS[method]
    if m is Method.CLOSED_FORM:
        return exact.z_closed_form(query)
    if m is Method.RECURRENCE:
        return exact.z_recurrence(query)
    if m is Method.SERIES:
        return exact.z_series(query)
    if m is Method.BRUTE_FORCE:
        return oracle.z_bruteforce(query)
    if m is Method.MONTE_CARLO:
        return oracle.z_monte_carlo(query, trials, seed)
    return numeric.float_result(query, m)


def cmd_compute(args) -> int:
    try:
        query = RunQuery.make(args.p, args.r, args.n)
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, str(exc))
    try:
        result = compute_result(query, args.method, args.trials, args.seed)
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, str(exc))
    except IllConditionedError as exc:
        return _fail(EXIT_REFUSED, f"{exc}; suggested fallback: --method recurrence or --method matrix")
    except DegenerateKernelError as exc:
        return _fail(EXIT_REFUSED, f"{exc}; suggested fallback: --method exact")
    except CapExceededError as exc:
        return _fail(EXIT_REFUSED, f"{exc}; suggested fallback: --method exact")
    except (DominanceError, ConvergenceError) as exc:
        return _fail(EXIT_REFUSED, f"{exc}; suggested fallback: --method recurrence")
    record = OutputRecord.from_result(query, result)
    if args.format == "json":
        _emit(json.dumps(record.to_json_obj()))
    elif args.format == "csv":
        _emit(records_to_csv([record]))
    else:
        _emit(record.to_text())
    return EXIT_OK


def cmd_table(args) -> int:
    try:
        query = RunQuery.make(args.p, args.r, args.n_max)
        cache = exact.series_coefficients(query.p, query.r, query.n)
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, str(exc))
    records = [
        OutputRecord.from_result(RunQuery(query.p, query.r, m), MethodResult.exact(z, Method.SERIES))
        for m, z in enumerate(cache.coefficients)
    ]
    if args.format == "json":
        _emit(records_to_json(records))
    elif args.format == "csv":
        _emit(records_to_csv(records))
    else:
        for rec in records:
            _emit(f"{rec.n:>6}  {rec.z_exact:>24}  {rec.z_float}")
    return EXIT_OK


def _complex_pair(x: complex) -> List[str]:
    return [format_float(x.real), format_float(x.imag)]


def _complex_text(x: complex) -> str:
    sign = "-" if x.imag < 0 else "+"
    return f"{format_float(x.real)} {sign} {format_float(abs(x.imag))}i"


def cmd_roots(args) -> int:
    try:
        p = to_rational(args.p)
        RunQuery.make(p, args.r, 0)
        s = numeric.spectral_decomposition(p, args.r)
    except (DomainError, DegenerateKernelError) as exc:
        return _fail(EXIT_DOMAIN, str(exc))
    except ConvergenceError as exc:
        return _fail(EXIT_REFUSED, str(exc))
    if args.format == "json":
        obj = {
            "p": format_rational(p),
            "r": args.r,
            "roots": [{"x": _complex_pair(x), "rho": _complex_pair(rho)} for x, rho in zip(s.roots, s.residues)],
            "min_root_separation": format_float(s.min_root_separation),
            "condition_flag": s.condition_flag.value,
        }
        _emit(json.dumps(obj, indent=2))
    else:
        lines = [f"roots of V(x) = 1 - x + q p^r x^(r+1) for p = {format_rational(p)}, r = {args.r}"]
        for k, (x, rho) in enumerate(zip(s.roots, s.residues), 1):
            lines.append(f"  x_{k} = {_complex_text(x)}    rho_{k} = {_complex_text(rho)}")
        lines.append(f"min_root_separation = {format_float(s.min_root_separation)}")
        lines.append(f"condition_flag = {s.condition_flag.value}")
        _emit("\n".join(lines))
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        p_list = [to_rational(tok) for tok in args.p_list.split(",") if tok.strip()]
        if not p_list:
            raise DomainError("empty --p-list")
        for p in p_list:
            RunQuery.make(p, 1, 0)
        if not 0 <= args.n_max <= 300:
            raise DomainError("--n-max must lie in 0..300")
        if not 1 <= args.r_max <= 10:
            raise DomainError("--r-max must lie in 1..10")
        if not 0 <= args.brute_max <= oracle.BRUTE_FORCE_CAP:
            raise DomainError(f"--brute-max must lie in 0..{oracle.BRUTE_FORCE_CAP}")
    except DomainError as exc:
        return _fail(EXIT_DOMAIN, str(exc))
    report = run_verify(args.n_max, args.r_max, p_list, args.brute_max)
    rows = [
        {
            "pair": s.pair,
            "tolerance": s.tolerance,
            "compared": s.compared,
            "refused": s.refused,
            "max_abs": format_float(s.max_abs),
            "max_rel": format_float(s.max_rel),
            "status": "pass" if s.ok else "FAIL",
        }
        for s in report.pairs
    ]
    if args.format == "json":
        for row, s in zip(rows, report.pairs):
            row["violations"] = [v.describe() for v in s.violations]
        _emit(json.dumps(rows, indent=1))
    elif args.format == "csv":
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
        writer.writeheader()
        writer.writerows(rows)
        _emit(buf.getvalue())
    else:
        g = report.grid
        lines = [f"grid: p in {{{', '.join(g['p_list'])}}}, r <= {g['r_max']}, n <= {g['n_max']}, brute force n <= {g['brute_max']}"]
        lines.append(f"{'pair':<28} {'tolerance':<12} {'compared':>8} {'refused':>7} {'max_abs':>12} {'max_rel':>12}  status")
        for row in rows:
            lines.append(
                f"{row['pair']:<28} {row['tolerance']:<12} {row['compared']:>8} {row['refused']:>7} "
                f"{float(row['max_abs']):>12.3e} {float(row['max_rel']):>12.3e}  {row['status']}"
            )
        _emit("\n".join(lines))
    if not report.ok:
        for v in report.violations:
            print(f"violation: {v.describe()}", file=sys.stderr)
        return EXIT_VERIFY_FAILED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="runprob",
        description="Probability of a run of r consecutive successes in n Bernoulli(p) trials.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    c = sub.add_parser("compute", help="evaluate one (p, r, n) with a chosen method")
    c.add_argument("--p", required=True, help="success probability, e.g. 1/2 or 0.5")
    c.add_argument("--r", required=True, type=int, help="run length")
    c.add_argument("--n", required=True, type=int, help="number of trials")
    c.add_argument("--method", choices=list(METHODS), default="exact")
    c.add_argument("--trials", type=int, default=10**6, help="Monte Carlo sample size")
    c.add_argument("--seed", type=int, default=42, help="Monte Carlo seed (64-bit unsigned)")
    c.add_argument("--format", choices=["text", "csv", "json"], default="text")
    c.set_defaults(func=cmd_compute)

    t = sub.add_parser("table", help="z_0 .. z_{n-max} from the series expansion")
    t.add_argument("--p", required=True, help="success probability")
    t.add_argument("--r", required=True, type=int, help="run length")
    t.add_argument("--n-max", required=True, type=int, help="tabulate n = 0..N_MAX")
    t.add_argument("--format", choices=["text", "csv", "json"], default="text")
    t.set_defaults(func=cmd_table)

    ro = sub.add_parser("roots", help="roots and residues of the kernel V")
    ro.add_argument("--p", required=True, help="success probability, strictly between 0 and 1")
    ro.add_argument("--r", required=True, type=int, help="run length")
    ro.add_argument("--format", choices=["text", "json"], default="text")
    ro.set_defaults(func=cmd_roots)

    v = sub.add_parser("verify", help="cross-method agreement sweep (Monte Carlo excluded)")
    v.add_argument("--n-max", type=int, default=50, help="largest n, at most 300")
    v.add_argument("--r-max", type=int, default=6, help="largest r, at most 10")
    v.add_argument("--p-list", default="1/3,1/2,2/3", help="comma-separated probabilities")
    v.add_argument("--brute-max", type=int, default=12, help="largest n for the brute-force oracle, at most 24")
    v.add_argument("--format", choices=["text", "csv", "json"], default="text")
    v.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
