from fractions import Fraction

import pytest
from gmpy2 import mpq
from hypothesis import given, settings
from hypothesis import strategies as st

from mirrorgw.series import (
    DivisionByNonUnit,
    Poly,
    PreconditionViolated,
    QSeries,
    RationalFn,
    SingularEvaluation,
    WLaurent,
    fmt_q,
    qs_analytic_ops,
    qs_revert_mirror,
    qs_ring_ops,
    ratfn_eval_at_series,
    to_q,
    wl_apply_D,
    wl_apply_M,
)

K = 8
rationals = st.fractions(min_value=-5, max_value=5, max_denominator=7)


def series(min_size=K + 1, first=None):
    coeffs = st.lists(rationals, min_size=min_size, max_size=min_size)
    if first is None:
        return coeffs.map(lambda c: QSeries(c))
    return coeffs.map(lambda c: QSeries([first] + c[1:]))


@settings(max_examples=40, deadline=None)
@given(series(), series(), series())
def test_ring_laws(a, b, c):
    assert (a + b) + c == a + (b + c)
    assert (a * b) * c == a * (b * c)
    assert a * (b + c) == a * b + a * c
    assert a * b == b * a
    assert a - a == QSeries.const(0, K)


@settings(max_examples=40, deadline=None)
@given(series(first=Fraction(0)))
def test_exp_log_inverse(a):
    assert a.exp().log() == a
    one_plus = a + 1
    assert one_plus.log().exp() == one_plus


@settings(max_examples=40, deadline=None)
@given(series(first=Fraction(0)))
def test_D_integrate_inverse(a):
    assert a.integrate_D().D() == a
    assert a.D().integrate_D() == a


@settings(max_examples=30, deadline=None)
@given(series(first=Fraction(1)), rationals)
def test_pow_rational_reciprocal(a, r):
    assert a.pow_rational(r) * a.pow_rational(-r) == QSeries.const(1, K)


@settings(max_examples=30, deadline=None)
@given(series(first=Fraction(1)))
def test_pow_rational_matches_integer_power(a):
    assert a.pow_rational(3) == a**3
    assert a.pow_rational(mpq(1, 2)) ** 2 == a


@settings(max_examples=30, deadline=None)
@given(series(first=Fraction(0)))
def test_revert_mirror_round_trip(J):
    Jt = qs_revert_mirror(J)
    Q = QSeries.q(K)
    q_of_Q = Q * Jt.exp()
    assert q_of_Q * J.compose(q_of_Q).exp() == Q


def test_revert_mirror_needs_vanishing_constant():
    with pytest.raises(PreconditionViolated):
        qs_revert_mirror(QSeries([1, 1]))


def test_truncation_is_min_of_operands():
    a = QSeries([1, 2, 3, 4])
    b = QSeries([1, 1])
    assert (a * b).K == 1
    assert (a + b).K == 1


def test_inverse_of_non_unit_raises():
    with pytest.raises(DivisionByNonUnit):
        QSeries([0, 1, 2]).inverse()


def test_preconditions():
    with pytest.raises(PreconditionViolated):
        QSeries([1, 1]).exp()
    with pytest.raises(PreconditionViolated):
        QSeries([2, 1]).log()
    with pytest.raises(PreconditionViolated):
        QSeries([1, 1]).integrate_D()
    with pytest.raises(PreconditionViolated):
        QSeries([1, 1])[5]


def test_dispatch_helpers():
    a = QSeries([1, 2, 3])
    b = QSeries([1, -1, 0])
    assert qs_ring_ops(a, b, "add") == a + b
    assert qs_ring_ops(a, b, "div") * b == a
    assert qs_analytic_ops(a, "pow_rational", mpq(1, 3)) ** 3 == a
    assert qs_analytic_ops(a, "D") == QSeries([0, 2, 6])


def test_geometric_series_inverse():
    assert QSeries([1, -1], K=5).inverse() == QSeries([1] * 6)


def test_rational_parsing_and_formatting():
    assert to_q("3/6") == mpq(1, 2)
    assert to_q(Fraction(2, 4)) == mpq(1, 2)
    assert fmt_q(mpq(4, 2)) == "2"
    assert fmt_q(mpq(-1, 3)) == "-1/3"


def test_ratfn_eval_example():
    u = Poly([0, 1])
    R = RationalFn(u - 1, u + 1)
    S = QSeries([1, 1], K=4)
    expected = QSeries([0, 1], K=4) / QSeries([2, 1], K=4)
    assert ratfn_eval_at_series(R, S) == expected
    assert expected[1] == mpq(1, 2) and expected[2] == mpq(-1, 4)


def test_ratfn_trivial_examples():
    S = QSeries([3, 1, 4], K=2)
    assert ratfn_eval_at_series(RationalFn(1), S) == QSeries.const(1, 2)
    assert ratfn_eval_at_series(RationalFn.u(), S) == S


def test_ratfn_singular_evaluation():
    u = Poly([0, 1])
    with pytest.raises(SingularEvaluation):
        ratfn_eval_at_series(RationalFn(Poly([1]), u - 1), QSeries([1, 1]))


def test_ratfn_normalization():
    u = Poly([0, 1])
    R = RationalFn((u - 1) * (u + 2), (u - 1) * Poly([2, 2]))
    assert R == RationalFn(u + 2, u + 1) * mpq(1, 2)
    assert R.den.c[-1] == 1


def test_wlaurent_window_and_holomorphy():
    H = WLaurent({-1: QSeries([1, 0]), 0: QSeries([0, 1]), 3: QSeries([1, 1])}, 2, 1)
    assert sorted(H.t) == [-1, 0]
    assert not H.is_holomorphic()
    with pytest.raises(PreconditionViolated):
        H.coeff(3)
    assert H.truncate_w(-1).w_range == (-1, -1)


def test_wl_apply_D_adds_shifted_q_derivative():
    H = WLaurent({0: QSeries([1, 2, 3]), 1: QSeries([0, 1, 0])}, 1, 2)
    DH = wl_apply_D(H)
    assert DH.coeff(0) == QSeries([1, 2, 3]) + QSeries([0, 1, 0])
    assert DH.coeff(-1) == QSeries([0, 2, 6])
    assert DH.hi == 0


def test_wl_apply_M_normalizes_before_differentiating():
    base = QSeries([2, 1, 0])
    H = WLaurent({0: base, 1: base * 3}, 1, 2)
    MH = wl_apply_M(H)
    assert MH.coeff(0) == QSeries.const(1, 2)
    assert MH.coeff(-1).is_zero()
