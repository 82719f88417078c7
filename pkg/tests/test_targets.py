import cmath
import math
import random
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catint.algebra import diagonal_algebra, field_algebra, TauMap
from catint.engine import random_step, theta
from catint.errors import UnsupportedConfiguration
from catint.measure import BoxMeasure, DistributionMeasure
from catint.scalars import Backend
from catint.stepfn import StepFunction, juxtapose
from catint.targets import (PiecewiseLinear, antiderivative_target, antiderive, direct_sum,
                            fourier_coefficient, integrate, integrate_report, integration_target,
                            kappa, mean_target, moment_target, poly_norm, sampling_l1_error,
                            weak_derivative)

R = Backend.RATIONAL
H = Fraction(1, 2)
SQ = DistributionMeasure.power(2)


def sf(coeffs):
    return StepFunction.from_coeffs([Fraction(c) for c in coeffs])


def test_mean_combination_examples():
    t = mean_target(BoxMeasure.lebesgue(1))
    assert t.delta([Fraction(3), Fraction(5)]) == 4
    sq = mean_target(BoxMeasure.uniform(SQ, 1))
    assert sq.meta["weights"] == [Fraction(1, 4), Fraction(3, 4)]


def test_block_mean_is_not_the_integral_for_curved_measures():
    # one-cell indicator of [3/4, 1] against F = x^2: true mass 1 - 9/16 = 7/16
    bm = BoxMeasure.uniform(SQ, 1)
    f = sf([0, 0, 0, 1])
    assert theta(f, mean_target(bm)) == Fraction(9, 16)
    assert direct_sum(f, bm) == Fraction(7, 16)
    t = integration_target(bm)
    assert t.value(theta(f, t)) == Fraction(7, 16)


def test_integration_target_falls_back_to_mean_when_flat():
    assert integration_target(BoxMeasure.lebesgue(2)).name == "mean"
    assert integration_target(BoxMeasure.uniform(SQ, 1)).name != "mean"
    assert moment_target(BoxMeasure.lebesgue(1)).value(moment_target(BoxMeasure.lebesgue(1)).v) == 1


def test_integrate_examples():
    for bm in (BoxMeasure.lebesgue(1), BoxMeasure.uniform(SQ, 2),
               BoxMeasure.uniform(DistributionMeasure((0, 1, 0, 1), Fraction(-1), Fraction(2)), 1)):
        one = StepFunction.constant(Fraction(1), bm.n)
        assert integrate(one, bm) == bm.total
    assert integrate(lambda x: x, BoxMeasure.lebesgue(1), backend=R, u_min=1, tol=0) == H
    value = integrate(lambda x: x, BoxMeasure.uniform(SQ, 1), u_min=14, u_max=14, vectorized=True)
    assert abs(value - 2 / 3) < 1e-4


def test_integrate_report_for_step_functions():
    value, report = integrate_report(sf([1, 3]), BoxMeasure.lebesgue(1))
    assert value == 2 and report.converged and report.levels == [1]


def test_algebra_valued_target_is_equivariant():
    A = diagonal_algebra(2)
    tau = TauMap(A, (1, 0))
    t = integration_target(BoxMeasure.lebesgue(1), A, tau)
    x = theta(sf([2, 4]), t)
    assert t.lambda_action(A.element([5, 7]), x) == 15


def test_antiderivative_examples():
    F = antiderive(sf([1, 3]))
    assert list(F.values) == [0, H, 2]
    assert F(Fraction(1, 4)) == Fraction(1, 4)
    assert weak_derivative(F) == sf([1, 3])
    G = PiecewiseLinear(0, np.array([Fraction(0), Fraction(1)], dtype=object))
    assert kappa(G, G) == G
    with pytest.raises(UnsupportedConfiguration):
        antiderivative_target(bm=BoxMeasure.uniform(SQ, 1))
    with pytest.raises(UnsupportedConfiguration):
        antiderivative_target(bm=BoxMeasure.lebesgue(1, xi=Fraction(1, 3)))
    antiderivative_target(bm=BoxMeasure.lebesgue(1), A=field_algebra())


def cumulative(coeffs, u):
    out, acc = [Fraction(0)], Fraction(0)
    for c in coeffs:
        acc += c / 2 ** u
        out.append(acc)
    return out


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 8), st.integers(0, 2 ** 20))
def test_antiderivative_properties(u, seed):
    rng = random.Random(seed)
    f, g = random_step(rng, 1, u, R), random_step(rng, 1, u, R)
    F = antiderive(f)
    assert list(F.values) == cumulative(list(f.coeffs), u)
    assert weak_derivative(F) == f
    assert integrate(f, BoxMeasure.lebesgue(1)) == F.at_end()
    t = antiderivative_target()
    assert theta(juxtapose([f, g]), t) == kappa(F, antiderive(g))


def test_fourier():
    assert abs(fourier_coefficient(StepFunction.constant(Fraction(1)), 0) - 1) < 1e-12
    square = sf([1, -1])
    c1 = fourier_coefficient(square, 1)
    assert abs(c1 - (-2j / math.pi)) < 1e-3
    # hand integration: c_k of the square wave is 2/(i pi k) for odd k, 0 for even
    for k in (2, 3, -3):
        want = 0 if k % 2 == 0 else 2 / (1j * math.pi * k)
        assert abs(fourier_coefficient(square, k) - want) < 1e-3
    # e^{2 pi i x} has c_1 = 1
    c = fourier_coefficient(lambda x: math.cos(2 * math.pi * x), 1)
    assert abs(c - 0.5) < 1e-6
    assert abs(cmath.phase(fourier_coefficient(square, 1)) + math.pi / 2) < 1e-9


def test_poly_norm():
    value, report = poly_norm([-1, 2], 1, u_min=6, u_max=14, tol=1e-9)
    assert abs(value - 0.5) < 1e-6
    two, _ = poly_norm([0, 1], 2, u_min=10, u_max=14, tol=1e-9)
    assert abs(two - 3 ** -0.5) < 1e-6


def test_sampling_l1_error_oracles():
    # P = x, midpoint sample: each cell contributes 2 * (h/2)^2 / 2 = h^2 / 4
    for u in (1, 3, 6):
        h = 2.0 ** -u
        assert sampling_l1_error([0, 1], u) == pytest.approx(2 ** u * h * h / 4, rel=1e-12)
        assert sampling_l1_error([0, 1], u, "left") == pytest.approx(2 ** u * h * h / 2, rel=1e-12)
    assert sampling_l1_error([3], 4) == 0.0
    errs = [sampling_l1_error([0, 0, 1], u) for u in range(1, 15)]
    assert all(b <= a for a, b in zip(errs, errs[1:]))
