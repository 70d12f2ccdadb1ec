import pytest
from gmpy2 import mpq

from mirrorgw.asym import (
    Asym,
    AsymptoticData,
    IdentityViolation,
    appendix_b_oracles,
    build_L_operators,
    compute_chi,
    compute_H_mj,
    compute_Phi_families,
    compute_Phi_m_c,
    solve_asymptotic_expansion,
    solve_L,
)
from mirrorgw.hyper import CIGeometry
from mirrorgw.identities import check_asymptotics, ode_residual
from mirrorgw.series import Poly, QSeries, RationalFn

K = 8
QUINTIC = CIGeometry(5, (5,))
CUBIC = CIGeometry(5, (3,))
P4 = CIGeometry(5)


def test_L_projective_space_closed_form():
    assert solve_L(P4, K) == QSeries([1, 1], K=K).pow_rational(mpq(1, 5))


def test_L_calabi_yau_closed_form():
    assert solve_L(QUINTIC, K) == QSeries([1, -3125], K=K).pow_rational(mpq(-1, 5))


def test_L_cubic_first_coefficient_and_residual():
    L = solve_L(CUBIC, K)
    assert L[1] == mpq(27, 5)
    q = QSeries.q(K)
    assert L**5 - q * 27 * L**3 == QSeries.const(1, K)


def test_chi_examples():
    assert compute_chi(CUBIC) == (1, 2, mpq(11, 9), mpq(2, 9))
    assert compute_chi(P4) == (1,)
    for g in [(5, 5), (6, 2, 2), (7, 3, 2)]:
        geom = CIGeometry(g[0], g[1:])
        chi = compute_chi(geom)
        assert chi[0] == 1
        assert chi[1] == mpq(geom.size + geom.l, 2)


def test_H_mj_examples():
    u = Poly([0, 1])
    geom = CUBIC
    frac = RationalFn(u - 1, Poly([geom.size, geom.nu]))
    for m in range(5):
        assert compute_H_mj(geom, m, 0) == RationalFn(1)
        assert compute_H_mj(geom, m, m + 1) == RationalFn(0)
        assert compute_H_mj(geom, m, 1) == frac * mpq(m * (m - 1), 2)


def test_H_mj_recursion_step():
    u = Poly([0, 1])
    geom = CUBIC
    frac = RationalFn(u - 1, Poly([geom.size, geom.nu]))
    low = compute_H_mj(geom, 2, 1)
    expected = compute_H_mj(geom, 2, 2) + frac * (low.u_ddu() * geom.n + low * 1)
    assert compute_H_mj(geom, 3, 2) == expected


def test_asymptotic_data_invariants():
    data = solve_asymptotic_expansion(CUBIC, 3, K)
    assert isinstance(data, AsymptoticData)
    assert data.L[0] == 1
    assert data.xi[0] == 0
    assert 1 + data.xi.D() == data.L
    assert data.Phi[0][0] == 1
    assert all(P[0] == 0 for P in data.Phi[1:])


def test_Phi0_closed_forms():
    for geom, expected in [
        (QUINTIC, QSeries([1, -3125], K=K).pow_rational(mpq(-1, 5))),
        (P4, QSeries([1, 1], K=K).pow_rational(mpq(-4, 10))),
    ]:
        assert solve_asymptotic_expansion(geom, 0, K).Phi[0] == expected
    assert solve_asymptotic_expansion(QUINTIC, 0, K).Phi[0] == solve_L(QUINTIC, K)


def test_first_operator_structure():
    ops = build_L_operators(CUBIC, K)
    assert [op.k for op in ops] == list(range(1, CUBIC.n + 1))
    assert all(len(op.coeff) == op.k + 1 for op in ops)
    a = Asym.get(CUBIC, K)
    assert ops[0].coeff[1] == a.E


@pytest.mark.parametrize("g", [(5,), (5, 3), (5, 5), (6, 2, 2), (6, 3, 3)])
def test_asymptotic_checks(g):
    geom = CIGeometry(g[0], g[1:])
    check_asymptotics(geom, K, B=3).raise_if_failed()


def test_ode_residual_vanishes():
    for g in [(5, 3), (5, 5), (6, 2, 2)]:
        geom = CIGeometry(g[0], g[1:])
        B = 3
        res = ode_residual(geom, 6, B)
        for e in range(geom.n - B, geom.n + 1):
            assert res.get(e, QSeries.const(0, 6)).is_zero()


def test_Phi_families_degree_zero_part():
    a = Asym.get(QUINTIC, K)
    L, P0 = a.L, a.Phi0
    for p in range(QUINTIC.n):
        assert compute_Phi_families(QUINTIC, p, 0, K) / P0 == L ** (p - QUINTIC.l)


def test_Phi_families_first_correction_projective():
    a = Asym.get(P4, K)
    L = a.L
    for p in range(P4.n):
        A1 = -(L.D() / L) / L * mpq((P4.n - p) * p, 2)
        assert compute_Phi_families(P4, p, 1, K) == L**p * (a.Phi(1) + A1 * a.Phi0)


def test_Phi_m_c_examples():
    a = Asym.get(CUBIC, K)
    I0 = a.hyper.Ic(0)
    base = a.Phi0 * a.Phi0 / (I0 * I0)
    assert compute_Phi_m_c(CUBIC, 0, (), K) == base
    assert compute_Phi_m_c(CUBIC, 1, (), K) == -base
    assert compute_Phi_m_c(CUBIC, 3, (), K) == base * -6
    assert compute_Phi_m_c(CUBIC, 0, (1,), K) == -base * a.Phi(1) / (a.Phi0 * 2)


def test_oracle_examples():
    assert appendix_b_oracles("alternating", 2, 1, 1) == (-1, -1)
    assert appendix_b_oracles("power_sums", 1, 2, 1, 1) == (3, 3)


def test_oracle_mismatch_raises(monkeypatch):
    from mirrorgw import identities

    monkeypatch.setattr(identities, "b1_alternating", lambda *a: (mpq(0), mpq(1)))
    with pytest.raises(IdentityViolation):
        appendix_b_oracles("alternating", 2, 1, 1)
    assert appendix_b_oracles("alternating", 2, 1, 1, strict=False) == (0, 1)
    with pytest.raises(ValueError):
        appendix_b_oracles("nonexistent")
