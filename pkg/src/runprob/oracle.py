"""Ground truth for the analytic methods.

``z_bruteforce`` enumerates every success/failure sequence of length n.
``mc_estimate`` simulates sequences with xoshiro256** (Blackman & Vigna),
seeded through splitmix64, so any implementation of those two generators
reproduces the same estimate bit for bit.

Monte Carlo stream layout: trials are split into fixed blocks of
``MC_BLOCK`` sequences. Block j draws from a xoshiro256** state made of the
four splitmix64 outputs that follow the master seed advanced by ``4 j``
steps. Each draw yields one trial outcome: success iff its top 53 bits are
below ``ceil(p * 2**53)``. Because blocks are fixed, the estimate does not
depend on how many workers process them.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np

from ._backend import kernels, worker_count
from ._purepy import GOLDEN_GAMMA, MASK64
from .core import CapExceededError, DomainError, Method, MethodResult, RunQuery, validate_query

BRUTE_FORCE_CAP = 24
MC_BLOCK = 1 << 16


@dataclass(frozen=True)
class McEstimate:
    y_hat: float
    trials: int
    std_err: float
    seed: int
    hits: int


def has_run(mask: int, r: int) -> bool:
    """True when ``mask`` has at least ``r`` consecutive set bits."""
    for _ in range(r - 1):
        mask &= mask >> 1
    return mask != 0


def longest_run(mask: int) -> int:
    length = 0
    while mask:
        mask &= mask >> 1
        length += 1
    return length


def run_histogram(n: int, workers: Optional[int] = None) -> np.ndarray:
    """Counts of length-n sequences by (longest run, number of successes).

    The 2**n masks are split into contiguous shards; integer counts make the
    reduction order irrelevant.
    """
    total = 1 << n
    workers = worker_count(workers)
    if workers == 1 or total < (1 << 16):
        return kernels.longest_run_histogram(n, 0, total)
    step = -(-total // workers)
    bounds = [(lo, min(lo + step, total)) for lo in range(0, total, step)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda b: kernels.longest_run_histogram(n, b[0], b[1]), bounds))
    return sum(parts[1:], parts[0])


def run_free_counts(hist: np.ndarray, r: int) -> list:
    """Number of run-free sequences with k successes, k = 0..n."""
    return [int(v) for v in hist[:r].sum(axis=0)]


def z_from_counts(counts, p: Fraction) -> Fraction:
    n = len(counts) - 1
    q = 1 - p
    return sum((c * p**k * q ** (n - k) for k, c in enumerate(counts) if c), Fraction(0))


def z_bruteforce(query: RunQuery, workers: Optional[int] = None) -> MethodResult:
    """Exact z_n from all 2**n sequences, each weighted by p^k q^(n-k).

    Sequences are tallied by success count first, so each distinct weight is
    multiplied once. Raises CapExceededError above ``BRUTE_FORCE_CAP`` trials.
    """
    query = validate_query(query)
    if query.n > BRUTE_FORCE_CAP:
        raise CapExceededError(f"n={query.n} exceeds the enumeration cap {BRUTE_FORCE_CAP}")
    hist = run_histogram(query.n, workers)
    return MethodResult.exact(z_from_counts(run_free_counts(hist, query.r), query.p), Method.BRUTE_FORCE)


def bruteforce_table(n: int, p_values, r_max: Optional[int] = None, workers: Optional[int] = None) -> dict:
    """``{(p, r): z}`` for every r in 1..r_max (default n) from one enumeration."""
    if n > BRUTE_FORCE_CAP:
        raise CapExceededError(f"n={n} exceeds the enumeration cap {BRUTE_FORCE_CAP}")
    hist = run_histogram(n, workers)
    out = {}
    for r in range(1, (max(n, 1) if r_max is None else r_max) + 1):
        counts = run_free_counts(hist, r)
        for p in p_values:
            out[(p, r)] = z_from_counts(counts, p)
    return out


def success_threshold(p: Fraction) -> int:
    """``ceil(p * 2**53)``: a 53-bit draw below this counts as a success."""
    scaled = p * (1 << 53)
    return -((-scaled.numerator) // scaled.denominator)


def block_state(seed: int, block: int):
    state = (seed + 4 * block * GOLDEN_GAMMA) & MASK64
    out = []
    for _ in range(4):
        value, state = kernels.splitmix64(state)
        out.append(value)
    return tuple(out)


def mc_estimate(query: RunQuery, trials: int, seed: int, workers: Optional[int] = None) -> McEstimate:
    """Fraction of ``trials`` simulated sequences that contain a run of ``r``."""
    query = validate_query(query)
    if not isinstance(trials, int) or trials < 1:
        raise DomainError(f"trials must be a positive integer, got {trials!r}")
    if not isinstance(seed, int) or not 0 <= seed <= MASK64:
        raise DomainError(f"seed must be a 64-bit unsigned integer, got {seed!r}")
    threshold = success_threshold(query.p)
    blocks = [(j, min(MC_BLOCK, trials - j * MC_BLOCK)) for j in range(-(-trials // MC_BLOCK))]

    def run_block(job):
        j, size = job
        return kernels.mc_block(*block_state(seed, j), size, query.n, query.r, threshold)

    workers = worker_count(workers)
    if workers == 1 or len(blocks) == 1:
        hits = sum(map(run_block, blocks))
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            hits = sum(pool.map(run_block, blocks))
    y_hat = hits / trials
    return McEstimate(y_hat, trials, math.sqrt(y_hat * (1 - y_hat) / trials), seed, hits)


def z_monte_carlo(query: RunQuery, trials: int, seed: int) -> MethodResult:
    est = mc_estimate(query, trials, seed)
    return MethodResult.approx(1.0 - est.y_hat, Method.MONTE_CARLO, 4 * est.std_err)
