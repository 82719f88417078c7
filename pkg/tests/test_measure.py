from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from catint.errors import (IndexOutOfRange, InvalidMeasure, OutOfDomain, UnsupportedConfiguration,
                           ZeroTotalMeasure)
from catint.measure import (BoxMeasure, DistributionMeasure, SplitScheme, box_from_json,
                            cell_measure, interval_measure)

from oracles import cell_interval

H = Fraction(1, 2)


def test_interval_examples():
    leb = DistributionMeasure.lebesgue()
    assert interval_measure(leb, 0, H) == H
    sq = DistributionMeasure.power(2)
    assert interval_measure(sq, H, 1) == Fraction(3, 4)
    for m in (leb, sq):
        assert interval_measure(m, Fraction(1, 3), Fraction(1, 3)) == 0
    with pytest.raises(OutOfDomain):
        interval_measure(leb, H, 2)
    with pytest.raises(OutOfDomain):
        interval_measure(leb, H, Fraction(1, 4))


def test_cell_examples():
    bm = BoxMeasure.lebesgue(2)
    assert cell_measure(bm, 1, (0, 0)) == Fraction(1, 4)
    for n in (1, 2, 3):
        assert cell_measure(BoxMeasure.lebesgue(n), 0, (0,) * n) == 1
    with pytest.raises(IndexOutOfRange):
        cell_measure(bm, 1, (0, 2))
    with pytest.raises(IndexOutOfRange):
        cell_measure(bm, 1, (0,))


def test_measure_validation():
    with pytest.raises(InvalidMeasure):
        DistributionMeasure((0, 2, -2))  # 2x - 2x^2 turns down after 1/2
    with pytest.raises(ZeroTotalMeasure):
        DistributionMeasure((5,))
    with pytest.raises(UnsupportedConfiguration):
        DistributionMeasure.power(Fraction(1, 2))
    with pytest.raises(InvalidMeasure):
        SplitScheme(0, 1, 1)


def test_split_points_match_bit_walk():
    rho = Fraction(1, 3)
    s = SplitScheme(Fraction(-1), Fraction(2), Fraction(0))
    assert s.rho == rho
    for u in range(6):
        pts = s.points(u)
        assert pts[0] == -1 and pts[-1] == 2
        assert all(x < y for x, y in zip(pts, pts[1:]))
        for i in range(2 ** u):
            assert (pts[i], pts[i + 1]) == cell_interval(i, u, Fraction(-1), Fraction(2), rho)
        if u:
            assert list(s.points(u)[::2]) == list(s.points(u - 1))


def test_normalized_coefficients():
    # F(x) = x + x^3 on [-1, 2]: F(-1 + 3s) - F(-1) = 12 s - 27 s^2 + 27 s^3
    m = DistributionMeasure((0, 1, 0, 1), Fraction(-1), Fraction(2))
    assert m.normalized_coeffs() == (12, -27, 27)
    assert sum(m.normalized_coeffs()) == m.total == 12


def test_json():
    bm = box_from_json({"measure": {"kind": "power", "q": "2"}, "interval": {"a": "0", "b": "1"}, "xi": "1/3"}, 2)
    assert bm.n == 2 and bm.schemes[0].xi == Fraction(1, 3)
    assert bm.total == 1
    bm2 = box_from_json([{"measure": "lebesgue"}, {"measure": {"kind": "poly", "coeffs": ["0", "1", "1"]}}], 2)
    assert bm2.total == 2


measures = st.sampled_from([
    DistributionMeasure.lebesgue(),
    DistributionMeasure.power(2),
    DistributionMeasure.power(3, Fraction(0), Fraction(2)),
    DistributionMeasure((0, 1, 0, 1), Fraction(-1), Fraction(2)),
])
splits = st.sampled_from([None, Fraction(1, 3), Fraction(3, 4)])


@settings(max_examples=150, deadline=None)
@given(measures, splits, st.integers(1, 2), st.integers(0, 8), st.data())
def test_additivity(m, rel, n, u, data):
    xi = None if rel is None else m.a + rel * (m.b - m.a)
    bm = BoxMeasure((m,) * n, tuple(SplitScheme(m.a, m.b, xi) for _ in range(n)))
    cell = tuple(data.draw(st.integers(0, 2 ** u - 1)) for _ in range(n))
    kids = [tuple(2 * c + ((j >> (n - 1 - d)) & 1) for d, c in enumerate(cell)) for j in range(2 ** n)]
    assert bm.cell_measure(u, cell) == sum(bm.cell_measure(u + 1, k) for k in kids)
    if u <= 5:
        assert bm.cell_measures(u).sum() == bm.total
