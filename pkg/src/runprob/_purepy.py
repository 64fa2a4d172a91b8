"""Pure-Python versions of the hot loops.

Signatures and integer results match ``_kernels.pyx`` exactly; the compiled
module is preferred when it is importable.
"""
import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
LOG_DBL_MAX = math.log(np.finfo(float).max)
EPS = 2.0 ** -52


def splitmix64(state):
    """One splitmix64 step: returns ``(output, new_state)``."""
    state = (state + GOLDEN_GAMMA) & MASK64
    z = state
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31), state


def longest_run_histogram(n, lo, hi):
    """Histogram of (longest success run, success count) over masks ``lo <= m < hi``.

    Bit i of a mask is trial i; a set bit is a success. Entry ``[L, k]``
    counts sequences whose longest run is exactly L with k successes.
    """
    hist = np.zeros((n + 1, n + 1), dtype=np.int64)
    counts = {}
    for mask in range(lo, hi):
        longest = 0
        m = mask
        while m:
            m &= m >> 1
            longest += 1
        key = (longest, mask.bit_count())
        counts[key] = counts.get(key, 0) + 1
    for (longest, k), c in counts.items():
        hist[longest, k] = c
    return hist


def _xoshiro_next(s0, s1, s2, s3):
    x = (s1 * 5) & MASK64
    result = ((((x << 7) | (x >> 57)) & MASK64) * 9) & MASK64
    t = (s1 << 17) & MASK64
    s2 ^= s0
    s3 ^= s1
    s1 ^= s2
    s0 ^= s3
    s2 ^= t
    s3 = ((s3 << 45) | (s3 >> 19)) & MASK64
    return result, s0, s1, s2, s3


def xoshiro_stream(s0, s1, s2, s3, count):
    """First ``count`` xoshiro256** outputs from state (s0, s1, s2, s3)."""
    out = []
    for _ in range(count):
        result, s0, s1, s2, s3 = _xoshiro_next(s0, s1, s2, s3)
        out.append(result)
    return out


def mc_block(s0, s1, s2, s3, trials, n, r, threshold):
    """Count sequences with a run of ``r`` among ``trials`` simulated ones.

    Uses xoshiro256** from state (s0..s3); a draw is a success when its top
    53 bits are below ``threshold``.
    """
    hits = 0
    for _ in range(trials):
        streak = 0
        for _ in range(n):
            result, s0, s1, s2, s3 = _xoshiro_next(s0, s1, s2, s3)
            if (result >> 11) < threshold:
                streak += 1
                if streak >= r:
                    hits += 1
                    break
            else:
                streak = 0
    return hits


def recurrence_float(c, p_r, r, n_max):
    """z_0 .. z_{n_max} from ``z_{m+1} = z_m - c z_{m-r}`` in doubles."""
    out = np.empty(n_max + 1, dtype=np.float64)
    for m in range(min(r, n_max + 1)):
        out[m] = 1.0
    if n_max >= r:
        out[r] = 1.0 - p_r
    z = out.tolist()
    for m in range(r, n_max):
        z[m + 1] = z[m] - c * z[m - r]
    out[:] = z
    return out


def beta_logspace(n, r, log_c):
    """Alternating binomial sum with log-gamma magnitudes and Kahan summation.

    Returns ``(value, error_bound)``. Raises OverflowError when a term's
    magnitude leaves double range.
    """
    if n < 0:
        return 0.0, 0.0
    l_max = n // (r + 1)
    total = 0.0
    comp = 0.0
    max_partial = 0.0
    eval_err = 0.0
    for l in range(l_max + 1):
        k = n - l * r
        g0 = math.lgamma(k + 1.0)
        g1 = math.lgamma(l + 1.0)
        g2 = math.lgamma(k - l + 1.0)
        lc = l * log_c
        log_mag = g0 - g1 - g2 + lc
        if log_mag > LOG_DBL_MAX:
            raise OverflowError(f"term l={l} of beta({n}) exceeds double range")
        mag = math.exp(log_mag)
        eval_err += mag * EPS * (abs(g0) + abs(g1) + abs(g2) + abs(lc) + 4.0)
        term = -mag if l & 1 else mag
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if abs(total) > max_partial:
            max_partial = abs(total)
    bound = (l_max + 1) * EPS * max_partial + eval_err
    return total, bound
