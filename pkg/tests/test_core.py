from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from runprob.core import (
    DomainError,
    Method,
    MethodResult,
    Mode,
    RunQuery,
    binomial_exact,
    degenerate_z,
    format_rational,
    to_rational,
    validate_query,
)


def pascal_row(a):
    row = [1]
    for _ in range(a):
        row = [x + y for x, y in zip([0] + row, row + [0])]
    return row


def test_pascal_oracle_matches_frozen_value():
    assert pascal_row(60)[30] == 118264581564861424


@pytest.mark.parametrize(
    "a, b, expected",
    [(5, 2, 10), (0, 0, 1), (7, 0, 1), (60, 30, 118264581564861424), (3, 5, 0)],
)
def test_binomial_exact(a, b, expected):
    assert binomial_exact(a, b) == expected


def test_binomial_pascal_rule():
    for a in range(1, 101):
        for b in range(1, a + 1):
            assert binomial_exact(a, b) == binomial_exact(a - 1, b - 1) + binomial_exact(a - 1, b)


def test_binomial_rejects_negative():
    with pytest.raises(DomainError):
        binomial_exact(-1, 0)


def test_validate_query_ok():
    q = RunQuery(Fraction(1, 2), 2, 3)
    assert validate_query(q) is q


@pytest.mark.parametrize(
    "p, r, n",
    [
        (Fraction(3, 2), 2, 3),
        (Fraction(1, 2), 0, 3),
        (Fraction(-1, 5), 1, 3),
        (Fraction(1, 2), 2, -1),
        (Fraction(1, 2), 2.0, 3),
        (0.5, 2, 3),
    ],
)
def test_validate_query_rejects(p, r, n):
    with pytest.raises(DomainError):
        validate_query(RunQuery(p, r, n))


@pytest.mark.parametrize(
    "text, expected",
    [
        ("1/2", Fraction(1, 2)),
        ("0.5", Fraction(1, 2)),
        ("0.1", Fraction(1, 10)),
        (" 2/3 ", Fraction(2, 3)),
        ("1e-3", Fraction(1, 1000)),
        ("1", Fraction(1)),
        (0.1, Fraction(1, 10)),
        (1, Fraction(1)),
    ],
)
def test_to_rational(text, expected):
    assert to_rational(text) == expected


@pytest.mark.parametrize("bad", ["abc", "1/0", "", float("nan"), True, None])
def test_to_rational_rejects(bad):
    with pytest.raises(DomainError):
        to_rational(bad)


def test_make_parses_and_validates():
    assert RunQuery.make("0.25", 3, 7) == RunQuery(Fraction(1, 4), 3, 7)
    with pytest.raises(DomainError):
        RunQuery.make("5/4", 3, 7)


@given(st.fractions(), st.fractions())
def test_rational_sum_is_exact(a, b):
    assert (a + b) - b == a


@given(st.integers(-10**30, 10**30), st.integers(1, 10**30))
def test_canonical_form(num, den):
    x = Fraction(num, den)
    assert x.denominator > 0
    from math import gcd

    assert gcd(abs(x.numerator), x.denominator) == 1
    assert Fraction(x.numerator, x.denominator) == x
    assert to_rational(format_rational(x)) == x


def test_degenerate_short_circuit():
    assert degenerate_z(RunQuery(Fraction(0), 3, 10)) == 1
    assert degenerate_z(RunQuery(Fraction(1), 3, 2)) == 1
    assert degenerate_z(RunQuery(Fraction(1), 3, 3)) == 0
    assert degenerate_z(RunQuery(Fraction(1, 2), 3, 3)) is None


def test_method_result_exact_invariants():
    res = MethodResult.exact(Fraction(5, 8), Method.CLOSED_FORM)
    assert res.y + res.z == 1
    with pytest.raises(ValueError):
        MethodResult(Fraction(5, 8), Fraction(1, 2), Method.CLOSED_FORM, Mode.EXACT)
    with pytest.raises(ValueError):
        MethodResult.exact(Fraction(9, 8), Method.CLOSED_FORM)


def test_method_result_float_rejects_rather_than_clamps():
    res = MethodResult.approx(1.0 + 1e-12, Method.SPECTRAL, 1e-11)
    assert res.z == 1.0 + 1e-12
    with pytest.raises(ValueError):
        MethodResult.approx(1.1, Method.SPECTRAL, 1e-11)
    with pytest.raises(ValueError):
        MethodResult.approx(0.5, Method.SPECTRAL, -1.0)
