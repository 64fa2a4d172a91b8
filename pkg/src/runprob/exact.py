"""Exact evaluators of the no-run probability z_n.

Three independent routes, all returning identical Fractions:

* the alternating binomial sum ``z_n = beta(n) - p^r beta(n - r)``,
* the order-(r+1) difference equation ``z_{m+1} = z_m - q p^r z_{m-r}``,
* power-series division of ``U(x) = 1 - p^r x^r`` by
  ``V(x) = 1 - x + q p^r x^(r+1)``.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from fractions import Fraction
from typing import List, Sequence, Tuple

from .core import (
    Method,
    MethodResult,
    RunQuery,
    binomial_exact,
    check_kernel_params,
    degenerate_z,
    validate_query,
)


@dataclass(frozen=True)
class BetaTerm:
    l: int
    k: int
    value: Fraction


@dataclass(frozen=True)
class BetaExpansion:
    """The individual summands of beta(n) for fixed ``r`` and ``p``.

    Term ``l`` comes from the pair ``(l, k)`` with ``r*l + k = n`` and
    ``0 <= l <= k``; ``l`` runs from 0 to ``n // (r + 1)``.
    """

    n: int
    r: int
    l_max: int
    terms: Tuple[BetaTerm, ...]

    @property
    def value(self) -> Fraction:
        return sum((t.value for t in self.terms), Fraction(0))


@dataclass(frozen=True)
class SeriesCache:
    """Coefficients z_0 .. z_{n_max} of the generating function U/V."""

    p: Fraction
    r: int
    coefficients: Tuple[Fraction, ...]

    def __len__(self):
        return len(self.coefficients)

    def __getitem__(self, m):
        return self.coefficients[m]

    @property
    def n_max(self) -> int:
        return len(self.coefficients) - 1


def kernel_constant(p: Fraction, r: int) -> Fraction:
    """``q * p**r``, the only nontrivial coefficient of V."""
    return (1 - p) * p**r


def beta_term(n: int, r: int, p: Fraction, l: int) -> Fraction:
    """Summand for pair ``(l, n - l*r)``; zero when ``l > n - l*r``."""
    k = n - l * r
    if k < 0:
        return Fraction(0)
    return (-1) ** l * binomial_exact(k, l) * kernel_constant(p, r) ** l


def beta_expansion(n: int, r: int, p: Fraction) -> BetaExpansion:
    check_kernel_params(p, r)
    if n < 0:
        return BetaExpansion(n, r, 0, ())
    l_max = n // (r + 1)
    terms = tuple(BetaTerm(l, n - l * r, beta_term(n, r, p, l)) for l in range(l_max + 1))
    return BetaExpansion(n, r, l_max, terms)


def beta_exact(n: int, r: int, p: Fraction) -> Fraction:
    """Coefficient of x^n in 1/V(x) as an alternating binomial sum.

    Zero for negative ``n``. The sum is accumulated over a common
    denominator ``d**l_max`` (``q p^r = c/d``) so only one reduction occurs.
    """
    check_kernel_params(p, r)
    if n < 0:
        return Fraction(0)
    c = kernel_constant(p, r)
    cn, cd = c.numerator, c.denominator
    l_max = n // (r + 1)
    total = 0
    for l in range(l_max + 1):
        term = binomial_exact(n - l * r, l) * cn**l * cd ** (l_max - l)
        total += -term if l & 1 else term
    return Fraction(total, cd**l_max)


def _z_closed_form_value(p: Fraction, r: int, n: int) -> Fraction:
    return beta_exact(n, r, p) - p**r * beta_exact(n - r, r, p)


def z_closed_form(query: RunQuery) -> MethodResult:
    query = validate_query(query)
    z = degenerate_z(query)
    if z is None:
        z = _z_closed_form_value(query.p, query.r, query.n)
    return MethodResult.exact(z, Method.CLOSED_FORM)


def _recurrence_scaled(p: Fraction, r: int, n_max: int, keep_all: bool):
    # Z_m = z_m * b**m is an integer when p = a/b:
    # Z_{m+1} = b Z_m - (b - a) a^r Z_{m-r}.
    a, b = p.numerator, p.denominator
    coeff = (b - a) * a**r
    seeds = [b**m for m in range(r)] + [b**r - a**r]
    if n_max <= r:
        return seeds[: n_max + 1] if keep_all else [seeds[n_max]]
    out = list(seeds) if keep_all else None
    window = deque(seeds, maxlen=r + 1)
    for _ in range(r, n_max):
        nxt = b * window[-1] - coeff * window[0]
        window.append(nxt)
        if keep_all:
            out.append(nxt)
    return out if keep_all else [window[-1]]


def recurrence_sequence(p: Fraction, r: int, n_max: int) -> List[Fraction]:
    """z_0 .. z_{n_max} from the difference equation, exactly."""
    check_kernel_params(p, r)
    b = p.denominator
    scaled = _recurrence_scaled(p, r, n_max, keep_all=True)
    return [Fraction(v, b**m) for m, v in enumerate(scaled)]


def z_recurrence(query: RunQuery) -> MethodResult:
    """Iterate the difference equation from the seeds up to ``query.n``.

    Seeds are ``z_0 = ... = z_{r-1} = 1`` and ``z_r = 1 - p^r``; only the
    last r+1 values are kept.
    """
    query = validate_query(query)
    z = degenerate_z(query)
    if z is None:
        (scaled,) = _recurrence_scaled(query.p, query.r, query.n, keep_all=False)
        z = Fraction(scaled, query.p.denominator ** query.n)
    return MethodResult.exact(z, Method.RECURRENCE)


def kernel_u(p: Fraction, r: int) -> List[Fraction]:
    """Coefficients of U(x) = 1 - p^r x^r, lowest degree first."""
    u = [Fraction(0)] * (r + 1)
    u[0] = Fraction(1)
    u[r] -= p**r
    return u


def kernel_v(p: Fraction, r: int) -> List[Fraction]:
    """Coefficients of V(x) = 1 - x + q p^r x^(r+1), lowest degree first."""
    v = [Fraction(0)] * (r + 2)
    v[0] = Fraction(1)
    v[1] = Fraction(-1)
    v[r + 1] = kernel_constant(p, r)
    return v


def series_divide(num: Sequence[Fraction], den: Sequence[Fraction], n_max: int) -> List[Fraction]:
    """First ``n_max + 1`` coefficients of the power series num/den.

    ``den[0]`` must be nonzero. Zero denominator coefficients are skipped.
    """
    if den[0] == 0:
        raise ZeroDivisionError("constant term of the denominator is zero")
    inv0 = 1 / Fraction(den[0])
    support = [(j, d) for j, d in enumerate(den) if j > 0 and d != 0]
    out: List[Fraction] = []
    for m in range(n_max + 1):
        acc = Fraction(num[m]) if m < len(num) else Fraction(0)
        for j, d in support:
            if j > m:
                break
            acc -= d * out[m - j]
        out.append(acc * inv0)
    return out


def series_coefficients(p: Fraction, r: int, n_max: int) -> SeriesCache:
    check_kernel_params(p, r)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    coeffs = series_divide(kernel_u(p, r), kernel_v(p, r), n_max)
    return SeriesCache(p, r, tuple(coeffs))


def beta_series_coefficients(p: Fraction, r: int, n_max: int) -> List[Fraction]:
    """Coefficients of 1/V(x) up to order ``n_max``."""
    check_kernel_params(p, r)
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return series_divide([Fraction(1)], kernel_v(p, r), n_max)


def z_series(query: RunQuery) -> MethodResult:
    query = validate_query(query)
    z = degenerate_z(query)
    if z is None:
        z = series_coefficients(query.p, query.r, query.n)[query.n]
    return MethodResult.exact(z, Method.SERIES)


def recurrence_residuals(zs: Sequence[Fraction], p: Fraction, r: int) -> List[Fraction]:
    """``z_{m+1} - z_m + q p^r z_{m-r}`` for every ``r <= m < len(zs) - 1``."""
    c = kernel_constant(p, r)
    return [zs[m + 1] - zs[m] + c * zs[m - r] for m in range(r, len(zs) - 1)]


def generating_identity_defect(zs: Sequence[Fraction], p: Fraction, r: int) -> List[Fraction]:
    """Coefficients of ``V(x) * sum(z_m x^m) - U(x)`` through order ``len(zs) - 1``."""
    v = kernel_v(p, r)
    u = kernel_u(p, r)
    out = []
    for m in range(len(zs)):
        acc = sum((v[j] * zs[m - j] for j in range(min(m, r + 1) + 1) if v[j]), Fraction(0))
        out.append(acc - (u[m] if m < len(u) else 0))
    return out
