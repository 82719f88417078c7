from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from catint.algebra import Algebra, TauMap, field_algebra
from catint.errors import (DimensionMismatch, EvaluationFailure, InvalidWeight, LevelOverflow,
                           LevelZero, MixedBackends, MixedLevels, OrderUnavailable)
from catint.measure import BoxMeasure, DistributionMeasure
from catint.scalars import Backend
from catint.stepfn import (StepFunction, abs_, add, ae_equal, direct_sum_norm, from_literal,
                           juxtapose, averaging_weight, max_level, module_action, ratio_weight,
                           refine, sample, split, step_norm_p, value_at)

from oracles import cell_interval

R = Backend.RATIONAL
H = Fraction(1, 2)


def sf(coeffs, n=1):
    return StepFunction.from_coeffs([Fraction(c) for c in coeffs], n)


def test_refine_example():
    assert refine(sf([3, 5])) == sf([3, 3, 5, 5])
    f = sf([1, 2, 3, 4], n=2)
    assert refine(f).tensor.tolist() == [[1, 1, 2, 2], [1, 1, 2, 2], [3, 3, 4, 4], [3, 3, 4, 4]]
    with pytest.raises(LevelOverflow):
        refine(StepFunction.constant(Fraction(1), 1, max_level(1)))


def test_split_example():
    assert split(sf([3, 3, 5, 5])) == [StepFunction.constant(Fraction(3)), StepFunction.constant(Fraction(5))]
    # n=2, level 1: corner (axis1, axis2) -> flat index axis1*2 + axis2
    parts = split(sf([1, 2, 3, 4], n=2))
    assert [p.coeffs[0] for p in parts] == [1, 2, 3, 4]
    with pytest.raises(LevelZero):
        split(StepFunction.constant(Fraction(1)))


def test_juxtapose_errors():
    a = StepFunction.constant(Fraction(1))
    with pytest.raises(MixedLevels):
        juxtapose([a, refine(a)])
    with pytest.raises(MixedBackends):
        juxtapose([a, StepFunction.constant(1.0)])
    with pytest.raises(DimensionMismatch):
        juxtapose([a, a, a])


def test_n2_corner_placement_matches_geometry():
    # each corner's constant must land on the quadrant named by its bits
    parts = [StepFunction.constant(Fraction(10 + j), 2) for j in range(4)]
    g = juxtapose(parts)
    for j in range(4):
        x = Fraction(1, 4) + H * (j >> 1)
        y = Fraction(1, 4) + H * (j & 1)
        assert value_at(g, (x, y)) == 10 + j


def test_ae_equal_and_pointwise():
    assert ae_equal(sf([2]), sf([2, 2, 2, 2]))
    assert not ae_equal(sf([2]), sf([2, 3]))
    assert add(sf([1, 2]), sf([1]), 3) == sf([4, 5])
    assert sf([1, -2]) * sf([3]) == sf([3, -6])
    assert abs_(sf([-1, 2])) == sf([1, 2])
    with pytest.raises(OrderUnavailable):
        abs_(StepFunction.constant(1j))


def test_module_action_scales_by_character():
    A = field_algebra()
    f = sf([1, -3])
    assert module_action(A, TauMap.identity(A), A.element([Fraction(2)]), f) == sf([2, -6])
    # lower-triangular 2x2 matrices with the character reading the (2,2) entry
    table = {("E11", "E11"): {"E11": 1}, ("E21", "E11"): {"E21": 1},
             ("E22", "E21"): {"E21": 1}, ("E22", "E22"): {"E22": 1}}
    T = Algebra.from_table(("E11", "E21", "E22"), table, {"E11": 1, "E22": 1})
    tau = TauMap(T, (0, 0, 1))
    assert module_action(T, tau, T.basis_element("E11"), f) == sf([0, 0])
    assert module_action(T, tau, T.basis_element("E22"), f) == f


def test_norms():
    bm = BoxMeasure.lebesgue(1)
    assert step_norm_p(sf([1, -1]), bm, 1) == 1
    assert step_norm_p(sf([3, 5]), bm, 1) == 4
    assert step_norm_p(sf([0, 0]), bm, 2) == 0
    wide = BoxMeasure.lebesgue(2, Fraction(-1), Fraction(2))
    assert step_norm_p(StepFunction.constant(Fraction(1), 2, 3), wide, 1) == wide.total == 9
    sq = BoxMeasure.uniform(DistributionMeasure.power(2), 1)
    # weights 1/4 and 3/4
    assert step_norm_p(sf([4, -4]), sq, 1) == 4
    # p=2 is computed on the stored cells and changes with the level
    assert step_norm_p(sf([1]), bm, 2) == 1
    assert step_norm_p(sf([1, 1]), bm, 2) == pytest.approx(2 ** -0.5)


def test_direct_sum_norm():
    assert direct_sum_norm([Fraction(1), Fraction(3)], 1, averaging_weight(1)) == 2
    assert direct_sum_norm([3, 4], 2) == 5
    assert direct_sum_norm([1, 1], 1, averaging_weight(1)) == 1
    w = ratio_weight(BoxMeasure.lebesgue(1))
    assert w == 1 and direct_sum_norm([1, 1], 1, w) == 2
    assert ratio_weight(BoxMeasure.lebesgue(2, Fraction(0), Fraction(2))) == Fraction(1, 4)
    mixed = BoxMeasure((DistributionMeasure.lebesgue(), DistributionMeasure.power(2)),
                       BoxMeasure.lebesgue(2).schemes)
    with pytest.raises(InvalidWeight):
        ratio_weight(mixed)
    with pytest.raises(InvalidWeight):
        direct_sum_norm([1], 1, 0)


def test_sample_conventions():
    assert sample(lambda x: x, 1, 2, "left", backend=R) == sf([0, Fraction(1, 4), H, Fraction(3, 4)])
    assert sample(lambda x: x, 1, 1, "midpoint", backend=R) == sf([Fraction(1, 4), Fraction(3, 4)])
    bm = BoxMeasure.lebesgue(1, xi=Fraction(1, 3))
    got = sample(lambda x: x, bm, 3, "left", backend=R)
    want = [cell_interval(i, 3, Fraction(0), Fraction(1), Fraction(1, 3))[0] for i in range(8)]
    assert list(got.coeffs) == want
    vec = sample(lambda x, y: x * y, 2, 3, vectorized=True)
    loop = sample(lambda x, y: x * y, 2, 3)
    assert np.allclose(vec.coeffs.astype(float), loop.coeffs.astype(float))
    with pytest.raises(EvaluationFailure):
        sample(lambda x: 1 / (x - x), 1, 2)


def test_literal_round_trip():
    f = sf([Fraction(1, 3), -2, 5, 0])
    assert from_literal(f.to_literal()) == f
    assert from_literal({"n": 1, "u": 1, "coeffs": ["3", "5"]}) == sf([3, 5])


def test_immutable():
    f = sf([1, 2])
    with pytest.raises(AttributeError):
        f.u = 3


def distinct(n, u, offset=0, seed=0):
    vals = np.random.default_rng(seed).permutation(2 ** (n * u)) + offset
    return StepFunction(n, u, [Fraction(int(k), 7) for k in vals], R)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 3), st.integers(1, 5), st.integers(0, 2 ** 16))
def test_split_juxtapose_inverse(n, u, seed):
    if n * u > 12:
        u = 12 // n
    f = distinct(n, u, seed=seed)
    parts = split(f)
    assert juxtapose(parts) == f
    assert split(juxtapose(parts)) == parts


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 2), st.integers(1, 5), st.integers(0, 2 ** 16))
def test_split_commutes_with_refine(n, u, seed):
    f = distinct(n, u, seed=seed)
    assert split(refine(f)) == [refine(p) for p in split(f)]
