import math
from fractions import Fraction

import pytest
from hypothesis import given, strategies as st

from catint.errors import BackendMismatch, OrderUnavailable, ParseError
from catint.scalars import (Backend, Ordering, format_scalar, join, parse_scalar, scalar_compare,
                            scalar_norm, ulp_close)

rationals = st.fractions(min_value=-1000, max_value=1000, max_denominator=1000)
floats = st.floats(min_value=-1e6, max_value=1e6, allow_nan=False)


def test_norm_examples():
    assert scalar_norm(0) == 0
    assert scalar_norm(Fraction(-3, 2)) == Fraction(3, 2)
    assert isinstance(scalar_norm(Fraction(-3, 2)), Fraction)
    assert scalar_norm(complex(0, -2 / math.pi)) == pytest.approx(0.63662, abs=1e-5)


def test_compare_examples():
    assert scalar_compare(Fraction(1, 2), Fraction(1, 2)) is Ordering.EQUAL
    assert scalar_compare(0, 1) is Ordering.LESS
    assert scalar_compare(2.0, 1) is Ordering.GREATER
    with pytest.raises(OrderUnavailable):
        scalar_compare(1j, 2j)


@given(rationals, rationals)
def test_rational_norm_axioms(s, t):
    assert scalar_norm(s * t) == scalar_norm(s) * scalar_norm(t)
    assert scalar_norm(s + t) <= scalar_norm(s) + scalar_norm(t)
    assert (scalar_norm(s) == 0) == (s == 0)


@given(floats, floats)
def test_float_multiplicativity_within_ulps(s, t):
    assert ulp_close(scalar_norm(s * t), scalar_norm(s) * scalar_norm(t), 4)


@given(rationals, rationals)
def test_trichotomy_and_antisymmetry(a, b):
    got, back = scalar_compare(a, b), scalar_compare(b, a)
    assert got.value == -back.value
    assert (got is Ordering.EQUAL) == (a - b == 0)
    assert (got is Ordering.LESS) == (b - a > 0)


def test_parse_literals():
    assert parse_scalar("3/4") == Fraction(3, 4)
    assert parse_scalar("0.1") == Fraction(1, 10)
    assert parse_scalar("0.5", Backend.FLOAT) == 0.5
    assert parse_scalar({"re": 1, "im": -2}, Backend.COMPLEX) == complex(1, -2)
    with pytest.raises(ParseError):
        parse_scalar("x")
    with pytest.raises(BackendMismatch):
        parse_scalar({"re": 0, "im": 1}, Backend.FLOAT)


def test_format_round_trip():
    assert format_scalar(Fraction(-7, 3)) == "-7/3"
    assert parse_scalar(format_scalar(Fraction(-7, 3))) == Fraction(-7, 3)
    assert format_scalar(complex(0.5, -1)) == {"re": 0.5, "im": -1.0}


def test_coercion_refuses_loss():
    with pytest.raises(BackendMismatch):
        Backend.RATIONAL.coerce(0.1)
    with pytest.raises(BackendMismatch):
        Backend.FLOAT.coerce(1j)
    assert join(Backend.RATIONAL, Backend.FLOAT) is Backend.FLOAT
    assert join(Backend.FLOAT, Backend.COMPLEX) is Backend.COMPLEX
