"""Domain types, exact arithmetic helpers and query validation.

Exact values are carried as :class:`fractions.Fraction`, which keeps every
result in lowest terms with a positive denominator.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional, Union

BigRational = Fraction

EPS = 2.0 ** -52


class DomainError(ValueError):
    """Raised for queries outside the problem domain."""


class CapExceededError(ValueError):
    """Raised when exhaustive enumeration is asked for too many trials."""


class DegenerateKernelError(ValueError):
    """Raised when the denominator kernel loses its top coefficient (p in {0, 1})."""


class ConvergenceError(ArithmeticError):
    """Raised when the root iteration fails to meet its residual bound."""


class IllConditionedError(ArithmeticError):
    """Raised when nearly coincident roots make the root/residue sum unreliable."""

    fallback = "recurrence"


class DominanceError(ArithmeticError):
    """Raised when no single root controls the large-n behaviour."""


class Method(enum.Enum):
    CLOSED_FORM = "ClosedForm"
    RECURRENCE = "Recurrence"
    SERIES = "Series"
    SPECTRAL = "Spectral"
    ASYMPTOTIC = "Asymptotic"
    MATRIX_POWER = "MatrixPower"
    BRUTE_FORCE = "BruteForce"
    MONTE_CARLO = "MonteCarlo"


class Mode(enum.Enum):
    EXACT = "Exact"
    FLOAT = "Float"


def to_rational(value: Union[str, int, Fraction, float]) -> Fraction:
    """Convert ``value`` to an exact rational.

    Strings may be ``"a/b"`` or decimal (``"0.15"``, ``"1e-3"``); decimals are
    read exactly as power-of-ten fractions. Floats go through their shortest
    decimal repr, so ``0.1`` becomes ``1/10``.
    """
    if isinstance(value, bool):
        raise DomainError(f"not a probability: {value!r}")
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, float):
        if not math.isfinite(value):
            raise DomainError(f"not a finite probability: {value!r}")
        return Fraction(repr(value))
    if isinstance(value, str):
        try:
            return Fraction(value.strip())
        except (ValueError, ZeroDivisionError) as exc:
            raise DomainError(f"cannot parse probability {value!r}") from exc
    raise DomainError(f"unsupported probability type {type(value).__name__}")


def format_rational(x: Fraction) -> str:
    """``"a/b"``, or ``"a"`` when the denominator is 1."""
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class RunQuery:
    """One problem instance: success probability ``p``, run length ``r``, trials ``n``."""

    p: Fraction
    r: int
    n: int

    @classmethod
    def make(cls, p, r: int, n: int) -> "RunQuery":
        """Build and validate a query, parsing ``p`` exactly."""
        return validate_query(cls(to_rational(p), r, n))

    @property
    def q(self) -> Fraction:
        return 1 - self.p

    @property
    def is_degenerate(self) -> bool:
        return self.p == 0 or self.p == 1


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def validate_query(query: RunQuery) -> RunQuery:
    """Return ``query`` unchanged if it is a valid instance, else raise DomainError."""
    if not isinstance(query.p, Fraction):
        raise DomainError(f"p must be held exactly, got {type(query.p).__name__}")
    if not 0 <= query.p <= 1:
        raise DomainError(f"p={format_rational(query.p)} outside [0, 1]")
    if not _is_int(query.r) or query.r < 1:
        raise DomainError(f"run length r={query.r!r} must be an integer >= 1")
    if not _is_int(query.n) or query.n < 0:
        raise DomainError(f"trial count n={query.n!r} must be an integer >= 0")
    return query


def check_kernel_params(p: Fraction, r: int) -> None:
    if not isinstance(p, Fraction) or not 0 <= p <= 1:
        raise DomainError(f"p={p!r} must be an exact rational in [0, 1]")
    if not _is_int(r) or r < 1:
        raise DomainError(f"run length r={r!r} must be an integer >= 1")


def binomial_exact(a: int, b: int) -> int:
    """Binomial coefficient C(a, b) as an exact integer; 0 when ``b > a``."""
    if a < 0 or b < 0:
        raise DomainError("binomial arguments must be non-negative")
    return math.comb(a, b)


def degenerate_z(query: RunQuery) -> Optional[Fraction]:
    """No-run probability for p in {0, 1}, or None for an interior p."""
    if query.p == 0:
        return Fraction(1)
    if query.p == 1:
        return Fraction(1) if query.n < query.r else Fraction(0)
    return None


@dataclass(frozen=True)
class MethodResult:
    """A computed pair (z, y = 1 - z) tagged with how it was obtained.

    Exact results hold Fractions. Float results hold floats and, for
    approximate methods, an absolute ``error_bound``. A float ``z`` may stray
    outside [0, 1] only by its own error bound plus a few ulps; anything
    further is rejected rather than clamped.
    """

    z: Union[Fraction, float]
    y: Union[Fraction, float]
    method: Method
    mode: Mode
    error_bound: Optional[float] = None

    def __post_init__(self):
        if self.error_bound is not None and not self.error_bound >= 0:
            raise ValueError(f"error_bound must be non-negative, got {self.error_bound}")
        if self.mode is Mode.EXACT:
            if not isinstance(self.z, Fraction) or self.y != 1 - self.z:
                raise ValueError("exact result must satisfy y + z = 1 in rationals")
            if not 0 <= self.z <= 1:
                raise ValueError(f"z={self.z} outside [0, 1]")
        else:
            slack = (self.error_bound or 0.0) + 4 * EPS
            if not -slack <= self.z <= 1 + slack:
                raise ValueError(f"z={self.z!r} outside [0, 1] beyond its error bound")

    @classmethod
    def exact(cls, z: Fraction, method: Method) -> "MethodResult":
        return cls(z, 1 - z, method, Mode.EXACT)

    @classmethod
    def approx(cls, z: float, method: Method, error_bound: Optional[float] = None) -> "MethodResult":
        z = float(z)
        return cls(z, 1.0 - z, method, Mode.FLOAT, error_bound)

    @property
    def z_float(self) -> float:
        return float(self.z)

    @property
    def y_float(self) -> float:
        return float(self.y)
