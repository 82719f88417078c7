import math
from fractions import Fraction

import numpy as np
import pytest

from catint.errors import ParseError, UnsupportedConfiguration
from catint.expr import compile_expression, parse_function, variables_in
from catint.scalars import Backend

R = Backend.RATIONAL


def test_variables_in():
    assert variables_in("x1 * x3 + 1") == 3
    assert variables_in("2") == 0


def test_float_expressions():
    g = compile_expression("sin(3.141592653589793 * x1) ** 2 + x2 / 4", 2)
    assert g(0.5, 2.0) == pytest.approx(1.5)
    vec = g(np.array([0.5, 0.0]), np.array([2.0, 4.0]))
    assert np.allclose(vec, [1.5, 1.0])
    assert compile_expression("abs(-x1) + exp(0)", 1)(-2.0) == pytest.approx(3.0)


def test_rational_expressions_are_exact():
    g = compile_expression("x1 ** 2 / 3 + 0.1", 1, R)
    assert g(Fraction(1, 2)) == Fraction(1, 12) + Fraction(1, 10)
    with pytest.raises(UnsupportedConfiguration):
        compile_expression("sin(x1)", 1, R)(Fraction(1))


@pytest.mark.parametrize("text, column", [("x1 +* 2", 5), ("x1 + y", 6), ("foo(x1)", 1)])
def test_errors_carry_columns(text, column):
    with pytest.raises(ParseError) as info:
        compile_expression(text, 1)
    assert f"column {column}" in str(info.value)


def test_dunder_and_attribute_access_rejected():
    for text in ("x1.__class__", "__import__('os')", "[x1][0]", "lambda: 1"):
        with pytest.raises(ParseError):
            compile_expression(text, 1)


def test_variable_out_of_range():
    with pytest.raises(ParseError):
        compile_expression("x2", 1)


def test_literals():
    s = parse_function("step:1,3,5", backend=R)
    assert s.kind == "step" and list(s.step.coeffs) == [3, 5]
    s2 = parse_function("step:1,1,2,3,4", n=2, backend=R)
    assert s2.step.tensor.tolist() == [[1, 2], [3, 4]]
    with pytest.raises(ParseError):
        parse_function("step:2,1,2,3", backend=R)
    p = parse_function("poly:-1,2")
    assert p.sampler(0.75) == pytest.approx(0.5)
    pl = parse_function("pl:1,0,1/2,2", backend=R)
    assert list(pl.breakpoints.values) == [0, Fraction(1, 2), 2]
    with pytest.raises(ParseError):
        parse_function("pl:1,1,2,3", backend=R)
    e = parse_function("x1 * x2")
    assert e.n == 2 and e.sampler(2.0, 3.0) == 6.0
    assert parse_function("cos(2*x1)").sampler(0.5) == pytest.approx(math.cos(1))
    with pytest.raises(ParseError):
        parse_function("pi * x1")
