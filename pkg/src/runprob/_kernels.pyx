# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled hot loops. Mirrors ``_purepy`` function for function."""
import numpy as np
cimport numpy as cnp
from libc.math cimport lgamma, exp, fabs, log
from libc.float cimport DBL_MAX
from libc.stdint cimport uint64_t, int64_t

cnp.import_array()

cdef double EPS = 2.0 ** -52
cdef double LOG_DBL_MAX = log(DBL_MAX)


cdef inline uint64_t rotl(uint64_t x, int k) nogil:
    return (x << k) | (x >> (64 - k))


cdef inline int popcount64(uint64_t x) nogil:
    cdef int c = 0
    while x:
        x &= x - 1
        c += 1
    return c


def splitmix64(uint64_t state):
    cdef uint64_t z
    state += <uint64_t>0x9E3779B97F4A7C15
    z = state
    z = (z ^ (z >> 30)) * <uint64_t>0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * <uint64_t>0x94D049BB133111EB
    return z ^ (z >> 31), state


def longest_run_histogram(int n, uint64_t lo, uint64_t hi):
    cdef cnp.ndarray[int64_t, ndim=2] hist = np.zeros((n + 1, n + 1), dtype=np.int64)
    cdef int64_t[:, ::1] h = hist
    cdef uint64_t mask, m
    cdef int longest
    with nogil:
        mask = lo
        while mask < hi:
            longest = 0
            m = mask
            while m:
                m &= m >> 1
                longest += 1
            h[longest, popcount64(mask)] += 1
            mask += 1
    return hist


def xoshiro_stream(uint64_t s0, uint64_t s1, uint64_t s2, uint64_t s3, long count):
    cdef uint64_t result, t
    cdef long i
    out = []
    for i in range(count):
        result = rotl(s1 * 5, 7) * 9
        t = s1 << 17
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = rotl(s3, 45)
        out.append(result)
    return out


def mc_block(uint64_t s0, uint64_t s1, uint64_t s2, uint64_t s3,
             long trials, int n, int r, uint64_t threshold):
    cdef long hits = 0, i
    cdef int j, streak
    cdef uint64_t result, t
    with nogil:
        for i in range(trials):
            streak = 0
            for j in range(n):
                result = rotl(s1 * 5, 7) * 9
                t = s1 << 17
                s2 ^= s0
                s3 ^= s1
                s1 ^= s2
                s0 ^= s3
                s2 ^= t
                s3 = rotl(s3, 45)
                if (result >> 11) < threshold:
                    streak += 1
                    if streak >= r:
                        hits += 1
                        break
                else:
                    streak = 0
    return hits


def recurrence_float(double c, double p_r, int r, long n_max):
    cdef cnp.ndarray[double, ndim=1] out = np.empty(n_max + 1, dtype=np.float64)
    cdef double[::1] z = out
    cdef long m
    with nogil:
        for m in range(min(r, n_max + 1)):
            z[m] = 1.0
        if n_max >= r:
            z[r] = 1.0 - p_r
        for m in range(r, n_max):
            z[m + 1] = z[m] - c * z[m - r]
    return out


def beta_logspace(long n, int r, double log_c):
    cdef long l, k, l_max
    cdef double g0, g1, g2, lc, log_mag, mag, term, y, t
    cdef double total = 0.0, comp = 0.0, max_partial = 0.0, eval_err = 0.0
    if n < 0:
        return 0.0, 0.0
    l_max = n // (r + 1)
    for l in range(l_max + 1):
        k = n - l * r
        g0 = lgamma(k + 1.0)
        g1 = lgamma(l + 1.0)
        g2 = lgamma(k - l + 1.0)
        lc = l * log_c
        log_mag = g0 - g1 - g2 + lc
        if log_mag > LOG_DBL_MAX:
            raise OverflowError(f"term l={l} of beta({n}) exceeds double range")
        mag = exp(log_mag)
        eval_err += mag * EPS * (fabs(g0) + fabs(g1) + fabs(g2) + fabs(lc) + 4.0)
        term = -mag if l & 1 else mag
        y = term - comp
        t = total + y
        comp = (t - total) - y
        total = t
        if fabs(total) > max_partial:
            max_partial = fabs(total)
    return total, (l_max + 1) * EPS * max_partial + eval_err
