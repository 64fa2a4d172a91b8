"""Floating-point evaluators of the no-run probability.

* ``z_closed_form_float``: the alternating binomial sum with log-gamma
  magnitudes and compensated summation, escalated to extended precision when
  its own error bound shows the cancellation was too severe.
* ``solve_kernel_roots`` / ``z_spectral``: partial fractions over the roots of
  ``V(x) = 1 - x + q p^r x^(r+1)``.
* ``z_asymptotic``: the dominant-root term alone.
* ``z_matrix_power`` and ``z_recurrence_float``: the difference equation in
  doubles, by repeated squaring of its companion matrix or by direct stepping.

``x = 1/p`` is always a root of both U and V, so it carries a zero residue.
The solver pins it exactly and evaluates the remaining residues through the
deflated kernel ``W(x) = V(x) / (1 - p x) = 1 - q sum_{j=1..r} p^(j-1) x^j``,
which is well defined even when that root collides with another one.
"""
from __future__ import annotations

import cmath
import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Tuple

import mpmath
import numpy as np

from ._backend import kernels
from .core import (
    EPS,
    ConvergenceError,
    DegenerateKernelError,
    DominanceError,
    IllConditionedError,
    Method,
    MethodResult,
    RunQuery,
    check_kernel_params,
    degenerate_z,
    validate_query,
)
from .exact import kernel_constant

#: relative accuracy the float closed form aims for before escalating
CLOSED_FORM_TARGET = 1e-13
SEPARATION_THRESHOLD = 1e-6
MAX_SWEEPS = 200


class ConditionFlag(enum.Enum):
    WELL_SEPARATED = "WellSeparated"
    NEAR_MULTIPLE = "NearMultiple"


@dataclass(frozen=True)
class KernelPolynomials:
    """Float coefficients (lowest degree first) of U and V for one (p, r)."""

    u_coeffs: Tuple[float, ...]
    v_coeffs: Tuple[float, ...]
    p: float
    q: float
    r: int
    p_exact: Fraction

    @classmethod
    def build(cls, p, r: int) -> "KernelPolynomials":
        p = Fraction(p)
        check_kernel_params(p, r)
        u = [0.0] * (r + 1)
        u[0] = 1.0
        u[r] -= float(p**r)
        v = [0.0] * (r + 2)
        v[0] = 1.0
        v[1] = -1.0
        v[r + 1] = float(kernel_constant(p, r))
        return cls(tuple(u), tuple(v), float(p), float(1 - p), r, p)


@dataclass(frozen=True)
class SpectralDecomposition:
    """Roots of V (ascending modulus, then argument) with their residues."""

    p: Fraction
    r: int
    roots: Tuple[complex, ...]
    residues: Tuple[complex, ...]
    root_errors: Tuple[float, ...]
    min_root_separation: float
    condition_flag: ConditionFlag
    removable_index: int
    sweeps: int

    @property
    def well_separated(self) -> bool:
        return self.condition_flag is ConditionFlag.WELL_SEPARATED


def _horner(coeffs, x):
    acc = 0j if isinstance(x, complex) else 0.0
    for c in reversed(coeffs):
        acc = acc * x + c
    return acc


def _horner_d(coeffs, x):
    """Value and first derivative of a polynomial (lowest degree first)."""
    val = 0j
    der = 0j
    for c in reversed(coeffs):
        der = der * x + val
        val = val * x + c
    return val, der


def _deflated(p: float, q: float, r: int):
    # W = V / (1 - p x); S = U / (1 - p x)
    w = [1.0] + [-q * p ** (j - 1) for j in range(1, r + 1)]
    s = [p**j for j in range(r)]
    return w, s


def _aberth(v: np.ndarray, radius: float, max_sweeps: int):
    deg = len(v) - 1
    dv = np.arange(1, deg + 1) * v[1:]
    angles = 2 * np.pi * np.arange(deg) / deg + 0.4
    z = radius * np.exp(1j * angles)
    rev = v[::-1]
    drev = dv[::-1]
    for sweep in range(1, max_sweeps + 1):
        pz = np.polyval(rev, z)
        dpz = np.polyval(drev, z)
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = pz / dpz
            diff = z[:, None] - z[None, :]
            np.fill_diagonal(diff, 1.0)
            inv = 1.0 / diff
            np.fill_diagonal(inv, 0.0)
            w = ratio / (1.0 - ratio * inv.sum(axis=1))
        w = np.where(np.isfinite(w), w, 0.0)
        z = z - w
        if np.all(np.abs(w) <= 4 * EPS * np.maximum(np.abs(z), 1.0)):
            return z, sweep
    return z, max_sweeps


def _symmetrize(z: np.ndarray) -> np.ndarray:
    """Make the root set exactly closed under conjugation."""
    z = z.copy()
    real_tol = 1e-9
    is_real = np.abs(z.imag) <= real_tol * np.maximum(np.abs(z), 1.0)
    z[is_real] = z[is_real].real
    upper = [i for i in range(len(z)) if not is_real[i] and z[i].imag > 0]
    lower = [i for i in range(len(z)) if not is_real[i] and z[i].imag < 0]
    for i in upper:
        if not lower:
            break
        j = min(lower, key=lambda j: abs(z[i] - np.conj(z[j])))
        lower.remove(j)
        mid = 0.5 * (z[i] + np.conj(z[j]))
        z[i], z[j] = mid, np.conj(mid)
    return z


def _newton_polish(coeffs, x: complex, steps: int = 3) -> complex:
    for _ in range(steps):
        val, der = _horner_d(coeffs, x)
        if der == 0:
            break
        step = val / der
        x -= step
        if abs(step) <= EPS * abs(x):
            break
    return x


def _order_key(x: complex):
    # ascending modulus, ties by argument in (-pi, pi]
    return (abs(x), cmath.phase(x) if x.imag != 0 or x.real < 0 else 0.0)


def solve_kernel_roots(kernel: KernelPolynomials, max_sweeps: int = MAX_SWEEPS) -> SpectralDecomposition:
    """All ``r + 1`` roots of V by Aberth-Ehrlich iteration, with residues.

    Iteration starts on the circle of radius ``(q p^r)^(-1/(r+1))``. Each root
    is then Newton-polished; the one matching ``1/p`` is pinned there with a
    zero residue. Raises DegenerateKernelError for p in {0, 1} and
    ConvergenceError when a root misses the backward-error bound.
    """
    p, q, r = kernel.p, kernel.q, kernel.r
    if kernel.p_exact == 0 or kernel.p_exact == 1:
        raise DegenerateKernelError(f"V has degree < r+1 at p={kernel.p_exact}")
    v = np.array(kernel.v_coeffs, dtype=float)
    c = v[-1]
    radius = (1.0 / c) ** (1.0 / (r + 1))
    raw, sweeps = _aberth(v, radius, max_sweeps)
    raw = np.array([_newton_polish(kernel.v_coeffs, complex(x)) for x in raw])
    roots = _symmetrize(raw)

    w, s = _deflated(p, q, r)
    pole = 1.0 / p
    removable = int(np.argmin(np.abs(roots - pole)))
    polished = []
    for i, x in enumerate(roots):
        x = complex(x)
        if i == removable:
            polished.append(complex(pole))
        else:
            polished.append(_newton_polish(w, x))
    roots = _symmetrize(np.array(polished))
    roots[removable] = pole

    order = sorted(range(r + 1), key=lambda i: _order_key(complex(roots[i])))
    roots = [complex(roots[i]) for i in order]
    removable = order.index(removable)

    residues = []
    errors = []
    for i, x in enumerate(roots):
        vx, dvx = _horner_d(kernel.v_coeffs, x)
        bound = 1e-10 * max(1.0, abs(x) ** (r + 1))
        if abs(vx) > bound:
            raise ConvergenceError(
                f"root {x} misses residual bound: |V| = {abs(vx):.3e} > {bound:.3e} after {sweeps} sweeps"
            )
        if i == removable:
            residues.append(0j)
            errors.append(0.0)
            continue
        wx, dwx = _horner_d(w, x)
        sx = _horner(s, x)
        residues.append(-sx / dwx)
        errors.append(abs(wx) / abs(dwx) + EPS * abs(x) if dwx != 0 else math.inf)

    seps = [abs(a - b) for i, a in enumerate(roots) for b in roots[i + 1:]]
    min_sep = min(seps) if seps else math.inf
    scale = max(abs(x) for x in roots)
    flag = ConditionFlag.NEAR_MULTIPLE if min_sep < SEPARATION_THRESHOLD * scale else ConditionFlag.WELL_SEPARATED
    return SpectralDecomposition(
        kernel.p_exact, r, tuple(roots), tuple(residues), tuple(errors), min_sep, flag, removable, sweeps
    )


def spectral_decomposition(p, r: int) -> SpectralDecomposition:
    return solve_kernel_roots(KernelPolynomials.build(p, r))


def _check_matches(query: RunQuery, s: SpectralDecomposition):
    if s.p != query.p or s.r != query.r:
        raise ValueError(f"decomposition is for (p={s.p}, r={s.r}), query has (p={query.p}, r={query.r})")
    if not s.well_separated:
        raise IllConditionedError(
            f"roots of V nearly coincide (NearMultiple, min separation {s.min_root_separation:.3e})"
        )


def _inv_power(x: complex, e: int) -> complex:
    if x.imag == 0 and x.real > 0:
        return complex(math.pow(x.real, -e))
    return cmath.exp(-e * cmath.log(x))


def _residue_error(s: SpectralDecomposition, i: int) -> float:
    x, rho, dx = s.roots[i], s.residues[i], s.root_errors[i]
    if rho == 0 or dx == 0:
        return 0.0
    p, q = float(s.p), float(1 - s.p)
    w, sc = _deflated(p, q, s.r)
    h = max(dx, EPS * abs(x))
    shifted = -_horner(sc, x + h) / _horner_d(w, x + h)[1]
    return abs(shifted - rho) * dx / h


def z_spectral(query: RunQuery, s: SpectralDecomposition) -> MethodResult:
    """Sum of ``rho_k / x_k^(n+1)`` over the roots; refuses NearMultiple roots."""
    query = validate_query(query)
    _check_matches(query, s)
    e = query.n + 1
    total = 0j
    bound = 0.0
    for i, (x, rho) in enumerate(zip(s.roots, s.residues)):
        if rho == 0:
            continue
        term = rho * _inv_power(x, e)
        total += term
        rel = e * s.root_errors[i] / abs(x) + _residue_error(s, i) / abs(rho) + (e + 4) * EPS
        bound += abs(term) * rel
    bound += (len(s.roots) + 1) * EPS * abs(total)
    if abs(total.imag) > 1e-9:
        raise IllConditionedError(f"imaginary part {total.imag:.3e} of the root sum did not cancel")
    return MethodResult.approx(total.real, Method.SPECTRAL, bound)


def z_asymptotic(query: RunQuery, s: SpectralDecomposition) -> MethodResult:
    """Dominant-root estimate ``rho_1 / x_1^(n+1)``.

    The pinned root at ``1/p`` has zero weight and is skipped when picking
    the dominant root. ``error_bound`` covers the dropped terms only.
    """
    query = validate_query(query)
    _check_matches(query, s)
    live = [i for i, rho in enumerate(s.residues) if rho != 0]
    x1, rho1 = s.roots[live[0]], s.residues[live[0]]
    if not (x1.imag == 0 and x1.real > 1):
        raise DominanceError(f"smallest live root {x1} is not real and > 1")
    if len(live) > 1 and abs(s.roots[live[1]]) - abs(x1) < 1e-9:
        raise DominanceError("two smallest live roots have equal modulus")
    e = query.n + 1
    z = (rho1 * _inv_power(x1, e)).real
    if len(live) > 1:
        x2 = abs(s.roots[live[1]])
        rho_max = max(abs(s.residues[i]) for i in live[1:])
        bound = query.r * rho_max * math.exp(-e * math.log(x2))
    else:
        bound = 0.0
    return MethodResult.approx(z, Method.ASYMPTOTIC, bound)


def _beta_extended(n: int, r: int, c: Fraction, prec: int):
    """Beta sum in ``prec``-bit arithmetic: (value, error_bound) as mpf."""
    if n < 0:
        return mpmath.mpf(0), mpmath.mpf(0)
    with mpmath.workprec(prec):
        cm = mpmath.mpf(c.numerator) / c.denominator
        total = mpmath.mpf(0)
        max_partial = mpmath.mpf(0)
        abs_sum = mpmath.mpf(0)
        power = mpmath.mpf(1)
        l_max = n // (r + 1)
        for l in range(l_max + 1):
            term = math.comb(n - l * r, l) * power
            total = total - term if l & 1 else total + term
            abs_sum += abs(term)
            max_partial = max(max_partial, abs(total))
            power *= cm
        ulp = mpmath.ldexp(1, -prec)
        # per-term rounding grows with the power index, summation with the count
        err = ulp * ((l_max + 4) * abs_sum + (l_max + 1) * max_partial)
    return total, err


def _closed_form_extended(p: Fraction, r: int, n: int, start_prec: int):
    c = kernel_constant(p, r)
    pr = p**r
    prec = max(start_prec, 80)
    while True:
        b1, e1 = _beta_extended(n, r, c, prec)
        b2, e2 = _beta_extended(n - r, r, c, prec)
        with mpmath.workprec(prec):
            prm = mpmath.mpf(pr.numerator) / pr.denominator
            z = b1 - prm * b2
            err = e1 + prm * e2 + mpmath.ldexp(abs(z), 2 - prec)
        if z != 0 and err <= CLOSED_FORM_TARGET * 1e-3 * abs(z):
            zf = float(z)
            return zf, float(err) + math.ulp(zf), prec
        prec *= 2
        if prec > 1 << 20:
            raise ArithmeticError("extended-precision closed form failed to converge")


def closed_form_double(query: RunQuery):
    """Double-only closed form: ``(z, error_bound)``; may raise OverflowError."""
    p, r, n = query.p, query.r, query.n
    log_c = math.log(float(kernel_constant(p, r)))
    pr = float(p**r)
    b1, e1 = kernels.beta_logspace(n, r, log_c)
    b2, e2 = kernels.beta_logspace(n - r, r, log_c)
    z = b1 - pr * b2
    err = e1 + pr * e2 + 2 * EPS * (abs(b1) + pr * abs(b2))
    return z, err


def _max_log_term(n: int, r: int, log_c: float) -> float:
    if n < 0:
        return -math.inf
    return max(
        math.lgamma(n - l * r + 1) - math.lgamma(l + 1) - math.lgamma(n - l * r - l + 1) + l * log_c
        for l in range(n // (r + 1) + 1)
    )


def z_closed_form_float(query: RunQuery, extended: bool = True) -> MethodResult:
    """Closed form in floating point.

    The double-precision path (log-gamma binomials, Kahan summation) runs
    first. If ``extended`` and its error bound exceeds the target relative
    accuracy, or a term overflows, the sum is redone at a working precision
    sized from the largest term and doubled until the bound is met. With
    ``extended=False`` the double result is returned with its (possibly
    large) bound, and overflow propagates.
    """
    query = validate_query(query)
    z = degenerate_z(query)
    if z is not None:
        return MethodResult.approx(float(z), Method.CLOSED_FORM, 0.0)
    try:
        zd, err = closed_form_double(query)
    except OverflowError:
        if not extended:
            raise
        zd, err = math.nan, math.inf
    if not extended or (math.isfinite(zd) and err <= CLOSED_FORM_TARGET * abs(zd)):
        return MethodResult.approx(zd, Method.CLOSED_FORM, err)
    log_c = math.log(float(kernel_constant(query.p, query.r)))
    top = _max_log_term(query.n, query.r, log_c)
    # z_n >= q^n (all failures), so this many bits always covers the cancellation
    floor = query.n * math.log(float(query.q))
    guess = int((top - max(floor, math.log(abs(zd)) if zd and math.isfinite(zd) else floor)) / math.log(2)) + 64
    zf, bound, _ = _closed_form_extended(query.p, query.r, query.n, guess)
    return MethodResult.approx(zf, Method.CLOSED_FORM, bound)


def companion_matrix(c: float, r: int) -> np.ndarray:
    """Maps ``(z_m, ..., z_{m-r})`` to ``(z_{m+1}, ..., z_{m-r+1})``."""
    m = np.zeros((r + 1, r + 1))
    m[0, 0] = 1.0
    m[0, r] = -c
    for i in range(1, r + 1):
        m[i, i - 1] = 1.0
    return m


def matrix_power(m: np.ndarray, e: int) -> np.ndarray:
    """``m**e`` by binary repeated squaring."""
    result = np.eye(m.shape[0])
    base = m.copy()
    while e:
        if e & 1:
            result = result @ base
        e >>= 1
        if e:
            base = base @ base
    return result


def z_matrix_power(query: RunQuery) -> MethodResult:
    query = validate_query(query)
    z = degenerate_z(query)
    if z is not None:
        return MethodResult.approx(float(z), Method.MATRIX_POWER, 0.0)
    p, r, n = query.p, query.r, query.n
    pr = float(p**r)
    if n < r:
        return MethodResult.approx(1.0, Method.MATRIX_POWER, 0.0)
    if n == r:
        return MethodResult.approx(1.0 - pr, Method.MATRIX_POWER, EPS)
    seed = np.ones(r + 1)
    seed[0] = 1.0 - pr
    power = matrix_power(companion_matrix(float(kernel_constant(p, r)), r), n - r)
    zn = float(power[0] @ seed)
    steps = 2 * (n - r).bit_length()
    bound = steps * (r + 1) * EPS * (float(np.abs(power).sum(axis=1).max()) + 1.0) + EPS
    return MethodResult.approx(zn, Method.MATRIX_POWER, bound)


def recurrence_float_sequence(p, r: int, n_max: int) -> np.ndarray:
    p = Fraction(p)
    check_kernel_params(p, r)
    return kernels.recurrence_float(float(kernel_constant(p, r)), float(p**r), r, n_max)


def z_recurrence_float(query: RunQuery) -> MethodResult:
    query = validate_query(query)
    z = degenerate_z(query)
    if z is not None:
        return MethodResult.approx(float(z), Method.RECURRENCE, 0.0)
    seq = recurrence_float_sequence(query.p, query.r, query.n)
    return MethodResult.approx(float(seq[-1]), Method.RECURRENCE, 2 * (query.n + 1) * EPS)


def float_result(query: RunQuery, method: Method, decomposition: Optional[SpectralDecomposition] = None) -> MethodResult:
    """Dispatch helper for the float methods that need a decomposition."""
    if method in (Method.SPECTRAL, Method.ASYMPTOTIC):
        query = validate_query(query)
        if query.is_degenerate:
            raise DegenerateKernelError(f"V has degree < r+1 at p={query.p}")
        s = decomposition or spectral_decomposition(query.p, query.r)
        fn = z_spectral if method is Method.SPECTRAL else z_asymptotic
        return fn(query, s)
    return {
        Method.CLOSED_FORM: z_closed_form_float,
        Method.MATRIX_POWER: z_matrix_power,
        Method.RECURRENCE: z_recurrence_float,
    }[method](query)
