import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorgw.bps import BPSSeries, bps_from_gw, gw_from_bps, integrality_check
from mirrorgw.hyper import CIGeometry
from mirrorgw.invariants import InvariantSeries, cy_four_point_series, cy_three_point_series
from mirrorgw.structconst import HypothesisViolated

GEOM = CIGeometry(8, (8,))


def series(values, insertions=(2, 2, 2)):
    return InvariantSeries(GEOM, insertions, [mpq(x) for x in values])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.fractions(min_value=-1000, max_value=1000, max_denominator=5), min_size=1, max_size=13), st.integers(3, 6))
def test_round_trip(values, N):
    gw = series(values)
    bps = bps_from_gw(gw, N)
    assert gw_from_bps(bps, N) == gw.values
    if len(values) > 1:
        assert bps.n_values[1] == gw.values[1]


def test_index_zero_copied_through():
    assert bps_from_gw(series([7, 1, 2]), 3).n_values[0] == 7


def test_needs_three_points():
    with pytest.raises(HypothesisViolated):
        bps_from_gw(series([0, 1]), 2)


def test_table_one_second_degree():
    gw = cy_three_point_series(GEOM, 2, 2, 2, 2)
    n = bps_from_gw(gw, 3).n_values
    assert n[1] == gw.values[1]
    assert n[2] == gw.values[2] - n[1] == 821654025830400


def test_table_three_second_degree():
    geom = CIGeometry(9, (9,))
    gw = cy_four_point_series(geom, 2, 2, 2, 2, 2)
    n = bps_from_gw(gw, 4).n_values
    assert n[2] == gw.values[2] - 2 * n[1] == 1718927099008463268


@pytest.mark.parametrize("g", [(8, 8), (7, 7), (8, 2, 6)])
def test_divisor_compatibility(g):
    geom = CIGeometry(g[0], g[1:])
    top = geom.n - 1 - geom.l
    cs = (1, 2, top - 3) if top - 3 >= 1 else (1, 1, top - 2)
    three = bps_from_gw(cy_three_point_series(geom, *cs, 4), 3).n_values
    four = bps_from_gw(cy_four_point_series(geom, 1, *cs, 4), 4).n_values
    for d in range(1, 5):
        assert four[d] == d * three[d]


def test_integrality_reports():
    assert integrality_check(BPSSeries(GEOM, (), [mpq(0)] * 4)).ok
    bad = integrality_check(bps_from_gw(series([0, mpq(1, 2), 3]), 3))
    assert not bad.ok and bad.first_failure == 1 and bad.value == mpq(1, 2)
    good = integrality_check(bps_from_gw(cy_three_point_series(GEOM, 2, 2, 2, 4), 3))
    assert good.ok and good.first_failure is None
