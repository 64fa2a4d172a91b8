"""Cross-method agreement sweep over a (p, r, n) grid."""
from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from . import exact, numeric, oracle
from ._backend import worker_count
from .core import (
    DominanceError,
    IllConditionedError,
    RunQuery,
    format_rational,
    to_rational,
    validate_query,
)

SMALLEST_NORMAL = 2.2250738585072014e-308

CLOSED_FORM_FLOAT_REL = 1e-10
SPECTRAL_REL = 1e-8
MATRIX_ABS = 1e-11
RECURRENCE_FLOAT_ABS = 1e-11
ASYMPTOTIC_REL_SLACK = 1e-12


@dataclass(frozen=True)
class Violation:
    p: Fraction
    r: int
    n: int
    pair: str
    detail: str

    def describe(self) -> str:
        return f"p={format_rational(self.p)} r={self.r} n={self.n} {self.pair}: {self.detail}"


@dataclass
class PairSummary:
    pair: str
    tolerance: str
    compared: int = 0
    refused: int = 0
    max_abs: float = 0.0
    max_rel: float = 0.0
    violations: List[Violation] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, value, reference: Fraction):
        diff = abs(Fraction(value) - reference)
        self.compared += 1
        self.max_abs = max(self.max_abs, float(diff))
        rel = float(diff / reference) if reference else (0.0 if diff == 0 else float("inf"))
        self.max_rel = max(self.max_rel, rel)
        return diff, rel

    def merge(self, other: "PairSummary"):
        self.compared += other.compared
        self.refused += other.refused
        self.max_abs = max(self.max_abs, other.max_abs)
        self.max_rel = max(self.max_rel, other.max_rel)
        self.violations.extend(other.violations)


PAIRS: Tuple[Tuple[str, str], ...] = (
    ("ClosedForm~Recurrence", "exact"),
    ("ClosedForm~Series", "exact"),
    ("ClosedForm~BruteForce", "exact"),
    ("ClosedFormFloat~Exact", f"rel {CLOSED_FORM_FLOAT_REL:g}"),
    ("RecurrenceFloat~Exact", f"abs {RECURRENCE_FLOAT_ABS:g}"),
    ("MatrixPower~Exact", f"abs {MATRIX_ABS:g}"),
    ("MatrixPower~RecurrenceFloat", f"abs {MATRIX_ABS:g}"),
    ("Spectral~Exact", f"rel {SPECTRAL_REL:g}"),
    ("Asymptotic~Exact", "error_bound"),
)


def float_rel_ok(value: float, reference: Fraction, rel_tol: float) -> bool:
    """Relative check, degraded to one-ulp absolute where ``reference`` underflows."""
    diff = abs(Fraction(value) - reference)
    if reference >= SMALLEST_NORMAL:
        return diff <= rel_tol * reference
    return diff <= Fraction(2) ** -1074


def _check_cell(p: Fraction, r: int, n_max: int, brute: Dict[Tuple[int, Fraction, int], Fraction]):
    sums = {name: PairSummary(name, tol) for name, tol in PAIRS}

    def fail(pair, n, detail):
        sums[pair].violations.append(Violation(p, r, n, pair, detail))

    series = exact.series_coefficients(p, r, n_max)
    rec_float = numeric.recurrence_float_sequence(p, r, n_max) if 0 < p < 1 else None
    decomp = None
    if 0 < p < 1:
        decomp = numeric.spectral_decomposition(p, r)

    for n in range(n_max + 1):
        q = RunQuery(p, r, n)
        closed = exact.z_closed_form(q).z
        for pair, other in (
            ("ClosedForm~Recurrence", exact.z_recurrence(q).z),
            ("ClosedForm~Series", series[n]),
        ):
            sums[pair].record(other, closed)
            if other != closed:
                fail(pair, n, f"{format_rational(other)} != {format_rational(closed)}")
        if (n, p, r) in brute:
            other = brute[(n, p, r)]
            sums["ClosedForm~BruteForce"].record(other, closed)
            if other != closed:
                fail("ClosedForm~BruteForce", n, f"{format_rational(other)} != {format_rational(closed)}")

        cf = numeric.z_closed_form_float(q).z
        _, rel = sums["ClosedFormFloat~Exact"].record(cf, closed)
        if not float_rel_ok(cf, closed, CLOSED_FORM_FLOAT_REL):
            fail("ClosedFormFloat~Exact", n, f"relative error {rel:.3e}")

        mp = numeric.z_matrix_power(q).z
        diff, _ = sums["MatrixPower~Exact"].record(mp, closed)
        if diff > MATRIX_ABS:
            fail("MatrixPower~Exact", n, f"absolute error {float(diff):.3e}")

        if rec_float is not None:
            rf = float(rec_float[n])
            diff, _ = sums["RecurrenceFloat~Exact"].record(rf, closed)
            if diff > RECURRENCE_FLOAT_ABS:
                fail("RecurrenceFloat~Exact", n, f"absolute error {float(diff):.3e}")
            diff = abs(mp - rf)
            s = sums["MatrixPower~RecurrenceFloat"]
            s.compared += 1
            s.max_abs = max(s.max_abs, diff)
            if diff > MATRIX_ABS:
                fail("MatrixPower~RecurrenceFloat", n, f"absolute difference {diff:.3e}")

        if decomp is None:
            continue
        try:
            sp = numeric.z_spectral(q, decomp).z
        except IllConditionedError:
            sums["Spectral~Exact"].refused += 1
        else:
            _, rel = sums["Spectral~Exact"].record(sp, closed)
            if not float_rel_ok(sp, closed, SPECTRAL_REL):
                fail("Spectral~Exact", n, f"relative error {rel:.3e}")
        try:
            res = numeric.z_asymptotic(q, decomp)
        except (IllConditionedError, DominanceError):
            sums["Asymptotic~Exact"].refused += 1
        else:
            diff, _ = sums["Asymptotic~Exact"].record(res.z, closed)
            allowed = res.error_bound + ASYMPTOTIC_REL_SLACK * float(closed) + 2.0**-1074
            if diff > allowed:
                fail("Asymptotic~Exact", n, f"error {float(diff):.3e} exceeds bound {allowed:.3e}")
    return (p, r), sums


@dataclass
class VerifyReport:
    pairs: List[PairSummary]
    grid: Dict[str, object]

    @property
    def ok(self) -> bool:
        return all(s.ok for s in self.pairs)

    @property
    def violations(self) -> List[Violation]:
        out = [v for s in self.pairs for v in s.violations]
        return sorted(out, key=lambda v: (v.p, v.r, v.n, v.pair))


def run_verify(
    n_max: int,
    r_max: int,
    p_list: Sequence,
    brute_max: int = 12,
    workers: Optional[int] = None,
) -> VerifyReport:
    """Compare every method pair on ``p in p_list``, ``1 <= r <= r_max``, ``0 <= n <= n_max``."""
    ps = [to_rational(p) for p in p_list]
    for p in ps:
        validate_query(RunQuery(p, 1, 0))
    if not 0 <= n_max <= 300:
        raise ValueError("n_max must lie in 0..300")
    if not 1 <= r_max <= 10:
        raise ValueError("r_max must lie in 1..10")
    if not 0 <= brute_max <= oracle.BRUTE_FORCE_CAP:
        raise ValueError(f"brute_max must lie in 0..{oracle.BRUTE_FORCE_CAP}")
    ps = sorted(set(ps))

    brute = {}
    for n in range(min(brute_max, n_max) + 1):
        for (p, r), z in oracle.bruteforce_table(n, ps, r_max).items():
            brute[(n, p, r)] = z

    cells = [(p, r) for p in ps for r in range(1, r_max + 1)]
    workers = worker_count(workers)
    if workers == 1:
        results = [_check_cell(p, r, n_max, brute) for p, r in cells]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(lambda c: _check_cell(c[0], c[1], n_max, brute), cells))
    results.sort(key=lambda item: item[0])

    totals = {name: PairSummary(name, tol) for name, tol in PAIRS}
    for _, sums in results:
        for name, s in sums.items():
            totals[name].merge(s)
    for s in totals.values():
        s.violations.sort(key=lambda v: (v.p, v.r, v.n))
    grid = {"n_max": n_max, "r_max": r_max, "p_list": [format_rational(p) for p in ps], "brute_max": brute_max}
    return VerifyReport([totals[name] for name, _ in PAIRS], grid)
