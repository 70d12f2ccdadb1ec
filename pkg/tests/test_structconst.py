import itertools

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorgw.asym import Asym
from mirrorgw.brackets import bracket_decompose, hat_decompose
from mirrorgw.hyper import CIGeometry
from mirrorgw.structconst import (
    HypothesisViolated,
    InfeasibleKey,
    SCKey,
    compare_closed_forms,
    compare_engines,
    feasible_keys,
    sc_closed_forms,
    sc_recursive,
    sc_tree,
    support_ok,
    two_point_seed,
)
from mirrorgw.suites import CUBIC_STRUCTURE_CONSTANTS

QUINTIC = CIGeometry(5, (5,))
CUBIC = CIGeometry(5, (3,))
P4 = CIGeometry(5)

geometries = st.sampled_from([QUINTIC, CUBIC, P4, CIGeometry(6, (2, 2)), CIGeometry(8, (8,)), CIGeometry(7, (3,))])


def test_seed_degree_zero_is_a_sign():
    for b in range(3):
        assert two_point_seed(CUBIC, 2, 3, b, -1 - b, 0, 0) == (-1) ** b


def test_seed_vanishes_off_support():
    assert two_point_seed(CUBIC, 2, 2, 0, 0, 0, 0) == 0
    assert two_point_seed(CUBIC, 2, 1, 0, -1, 0, 0) == 0


def test_seed_quintic_degree_one():
    a = Asym.get(QUINTIC, 1)
    I0 = a.hyper.Ic(0)
    expected = (a.L**5 / (I0 * I0))[1]
    assert two_point_seed(QUINTIC, 3, 2, 0, -1, 1, 0) == expected == 2885


def test_hat_decompose_branches():
    assert hat_decompose(QUINTIC, 3) == (2, 0)
    assert hat_decompose(QUINTIC, 0) == (0, 1)
    assert all(hat_decompose(P4, p)[1] == 0 for p in range(5))


@settings(max_examples=200, deadline=None)
@given(geometries, st.integers(-30, 30), st.integers(0, 12))
def test_bracket_invariants(geom, p, d):
    n, l = geom.n, geom.l
    br, tau, brh, t = bracket_decompose(geom, p, d)
    assert 0 <= br <= n - 1 and 0 <= brh <= n - 1
    assert br + geom.nu * d + n * tau == p
    assert br + brh + n * t == n - 1 + l
    if d >= 1:
        prev = bracket_decompose(geom, p, d - 1)
        assert (prev.tau - tau, t) in {(0, 0), (1, 0), (0, 1)}


def test_bracket_examples():
    for p in range(5):
        assert bracket_decompose(CUBIC, p, 0)[:2] == (p, 0)
    data = bracket_decompose(CUBIC, 3, 1)
    assert (data.p_bracket, data.tau, data.p_hat_bracket, data.t_small) == (1, 0, 4, 0)


@pytest.mark.parametrize("p,d,value", CUBIC_STRUCTURE_CONSTANTS)
def test_cubic_constants_both_routes(p, d, value):
    b = (0,) * len(p)
    assert sc_recursive(CUBIC, SCKey(p, b, d), K=d) == value
    assert sc_tree(CUBIC, p, b, d, K=d) == value


def test_invalid_keys():
    with pytest.raises(InfeasibleKey):
        sc_recursive(CUBIC, SCKey((1, 2, 5), (0, 0, 0), 1))
    with pytest.raises(InfeasibleKey):
        sc_recursive(CUBIC, SCKey((1, 2), (0, 0, 0), 1))
    with pytest.raises(InfeasibleKey):
        sc_recursive(CUBIC, SCKey((1, 2, 3), (0, 0, 0), -1))


def test_off_support_keys_vanish():
    for p in itertools.product(range(CUBIC.n), repeat=3):
        for d in range(3):
            b = (0, 0, 0)
            if not support_ok(CUBIC, p, b, d, 0):
                assert sc_recursive(CUBIC, SCKey(p, b, d), K=2) == 0


def test_small_index_vanishing():
    geom = CIGeometry(6, (2, 2))
    for p in itertools.product(range(geom.n), repeat=3):
        if min(p) < geom.l:
            for d in range(3):
                assert sc_recursive(geom, SCKey(p, (0, 0, 0), d), K=2) == 0


def test_permutation_symmetry():
    for N in (3, 4):
        for d in range(3):
            for p, b in feasible_keys(CUBIC, N, d):
                v = sc_recursive(CUBIC, SCKey(p, b, d), K=2)
                for perm in itertools.permutations(range(N)):
                    pp = tuple(p[i] for i in perm)
                    bb = tuple(b[i] for i in perm)
                    assert sc_recursive(CUBIC, SCKey(pp, bb, d), K=2) == v


def test_closed_form_dispatch():
    assert sc_closed_forms(CUBIC, (4, 4, 4), (0, 0, 0), 0, 0, "degree_zero") == 0
    p = (2, 2, 2)
    assert sc_closed_forms(CUBIC, p, (0, 0, 0), 1, 0, "top_b") == sc_recursive(CUBIC, SCKey(p, (0, 0, 0), 1), K=1)
    with pytest.raises(HypothesisViolated):
        sc_closed_forms(CUBIC, (1, 1, 1, 1), (1, 0, 0, 0), 1, 0, "four_point")
    with pytest.raises(HypothesisViolated):
        sc_closed_forms(CUBIC, (1, 1, 1, 1), (0, 0, 0, 0), 1, 0, "projective")
    with pytest.raises(ValueError):
        sc_closed_forms(CUBIC, p, (0, 0, 0), 1, 0, "unknown")


@pytest.mark.parametrize("g", [(5, 3), (5, 5), (6, 2, 2), (5,)])
def test_engines_agree_small(g):
    geom = CIGeometry(g[0], g[1:])
    total, _, bad = compare_engines(geom, (3, 4), 2)
    assert total > 0 and not bad


@pytest.mark.parametrize("g", [(5, 3), (5, 5), (5,)])
def test_closed_forms_agree_small(g):
    geom = CIGeometry(g[0], g[1:])
    checks, bad = compare_closed_forms(geom, 2, Ns=(3, 4))
    assert checks > 0 and not bad


def test_top_b_multinomial_at_degree_zero():
    n, l = CUBIC.n, CUBIC.l
    for N in (4, 5):
        for p in itertools.product(range(l, n), repeat=N):
            if sum(p) != (N - 1) * (n - 1) + l:
                continue
            b = (N - 3,) + (0,) * (N - 1)
            assert sc_recursive(CUBIC, SCKey(p, b, 0), K=0) == mpq(1)
            break
