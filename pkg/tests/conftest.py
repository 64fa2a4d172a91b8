import itertools
from fractions import Fraction

import pytest

from runprob import _purepy

try:
    from runprob import _kernels
except ImportError:
    _kernels = None

P_GRID = [Fraction(1, 10), Fraction(1, 3), Fraction(1, 2), Fraction(2, 3), Fraction(9, 10)]


def naive_z(p, r, n):
    """Sum the weight of every sequence with no r consecutive successes.

    Deliberately slow and independent of the package: one weight per sequence,
    runs found by scanning windows.
    """
    p = Fraction(p)
    q = 1 - p
    total = Fraction(0)
    for seq in itertools.product((0, 1), repeat=n):
        if any(all(seq[i : i + r]) for i in range(n - r + 1)):
            continue
        k = sum(seq)
        total += p**k * q ** (n - k)
    return total


def fibonacci(m):
    a, b = 0, 1
    for _ in range(m):
        a, b = b, a + b
    return a


BACKENDS = [pytest.param(_purepy, id="python")]
if _kernels is not None:
    BACKENDS.append(pytest.param(_kernels, id="cython"))


@pytest.fixture(params=BACKENDS)
def backend(request):
    return request.param


ACCEPTANCE = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE):
            terminalreporter.write_line(line)
