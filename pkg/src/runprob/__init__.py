"""Probability of a run of ``r`` consecutive successes in ``n`` Bernoulli trials.

>>> from runprob import RunQuery, z_closed_form
>>> z_closed_form(RunQuery.make("1/2", 2, 3)).z
Fraction(5, 8)
"""
from ._backend import BACKEND
from .core import (
    BigRational,
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
    binomial_exact,
    validate_query,
)
from .exact import (
    BetaExpansion,
    SeriesCache,
    beta_exact,
    beta_expansion,
    beta_series_coefficients,
    series_coefficients,
    z_closed_form,
    z_recurrence,
    z_series,
)
from .numeric import (
    ConditionFlag,
    KernelPolynomials,
    SpectralDecomposition,
    solve_kernel_roots,
    spectral_decomposition,
    z_asymptotic,
    z_closed_form_float,
    z_matrix_power,
    z_recurrence_float,
    z_spectral,
)
from .oracle import McEstimate, mc_estimate, z_bruteforce

__all__ = [
    "BACKEND",
    "BetaExpansion",
    "BigRational",
    "CapExceededError",
    "ConditionFlag",
    "ConvergenceError",
    "DegenerateKernelError",
    "DomainError",
    "DominanceError",
    "IllConditionedError",
    "KernelPolynomials",
    "McEstimate",
    "Method",
    "MethodResult",
    "Mode",
    "RunQuery",
    "SeriesCache",
    "SpectralDecomposition",
    "beta_exact",
    "beta_expansion",
    "beta_series_coefficients",
    "binomial_exact",
    "mc_estimate",
    "series_coefficients",
    "solve_kernel_roots",
    "spectral_decomposition",
    "validate_query",
    "z_asymptotic",
    "z_bruteforce",
    "z_closed_form",
    "z_closed_form_float",
    "z_matrix_power",
    "z_recurrence",
    "z_recurrence_float",
    "z_series",
    "z_spectral",
]
