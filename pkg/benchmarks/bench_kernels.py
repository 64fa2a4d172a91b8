"""Time the compiled kernels against the pure-Python fallback.

Usage::

    python benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs on identical inputs under both backends; the table reports
the best wall time of ``--repeat`` runs and the speedup of the compiled path.
"""
import argparse
import math
import sys
import timeit

from runprob import _purepy

try:
    from runprob import _kernels
except ImportError:
    _kernels = None


def cases(quick):
    n_hist = 14 if quick else 18
    trials = 20_000 if quick else 200_000
    return [
        (f"longest_run_histogram n={n_hist}", "longest_run_histogram", (n_hist, 0, 1 << n_hist)),
        (f"mc_block trials={trials} n=10 r=3", "mc_block", (1, 2, 3, 4, trials, 10, 3, 2**52)),
        ("recurrence_float n=10^5 r=4", "recurrence_float", (0.0123, 0.3, 4, 100_000)),
        ("beta_logspace n=2000 r=1", "beta_logspace", (2000, 1, math.log(0.09))),
    ]


def best_time(fn, args, repeat):
    return min(timeit.repeat(lambda: fn(*args), number=1, repeat=repeat))


def main(argv=None):
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    parser.add_argument("--quick", action="store_true", help="smaller inputs")
    args = parser.parse_args(argv)
    if _kernels is None:
        print("compiled kernels are not built; install with the Cython extension first", file=sys.stderr)
        return 1
    print(f"{'kernel':<40} {'python [s]':>12} {'cython [s]':>12} {'speedup':>9}")
    for label, name, kargs in cases(args.quick):
        t_py = best_time(getattr(_purepy, name), kargs, args.repeat)
        t_cy = best_time(getattr(_kernels, name), kargs, args.repeat)
        print(f"{label:<40} {t_py:>12.4f} {t_cy:>12.4f} {t_py / t_cy:>8.1f}x")
    return 0


if __name__ == "__main__":
    sys.exit(main())
