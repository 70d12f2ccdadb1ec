"""Large-w asymptotic expansion of the hypergeometric series and its differential operators."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, lru_cache

from gmpy2 import mpq

from .hyper import Hyper
from .series import ONE, ZERO, Poly, PreconditionViolated, QSeries, RationalFn, ratfn_eval_at_series


@dataclass(frozen=True)
class AsymptoticData:
    geometry: object
    L: QSeries
    chi: tuple
    xi: QSeries
    Phi: list


@dataclass(frozen=True)
class OperatorL:
    """k-th operator of the asymptotic recursion; coeff[i] multiplies D^i."""

    k: int
    coeff: list


class ObstructionNonzero(ArithmeticError):
    pass


class IdentityViolation(AssertionError):
    pass


def solve_L(geom, K):
    """Unique L in 1 + qQ[[q]] with L^n - A q L^|a| = 1."""
    n, A, s = geom.n, geom.a_pow_a, geom.size
    q = QSeries.q(K)
    L = QSeries.const(1, K)
    for _ in range(K + 1):
        L = (1 + q * A * L**s).pow_rational(mpq(1, n))
    return L


def compute_chi(geom):
    """chi_0..chi_|a| of a geometry."""
    return _chi(tuple(geom.a))


@lru_cache(maxsize=None)
def _chi(a):
    """chi_0..chi_|a| from prod_k prod_{r=1}^{a_k} (a_k D + r) = a^a sum_i chi_{|a|-i} D^i."""
    a = tuple(a)
    P = Poly([1])
    for ak in a:
        for r in range(1, ak + 1):
            P = P * Poly([r, ak])
    A = math.prod(x**x for x in a)
    s = sum(a)
    coeffs = list(P.c) + [ZERO] * (s + 1 - len(P.c))
    return tuple(coeffs[s - i] / A for i in range(s + 1))


def compute_H_mj(geom, m, j):
    """The rational function H_{m,j}(u) of the asymptotic recursion."""
    return _H_mj(m, j, geom.n, geom.size, geom.nu)


@lru_cache(maxsize=None)
def _H_mj(m, j, n, size, nu):
    if j < 0 or j > m or m < 0:
        return RationalFn(0)
    if m == 0:
        return RationalFn(1)
    prev = _H_mj(m - 1, j, n, size, nu)
    low = _H_mj(m - 1, j - 1, n, size, nu)
    if not low.num:
        return prev
    fac = RationalFn(Poly([-1, 1]), Poly([size, nu]))
    return prev + fac * (low.u_ddu() * n + low * (m - j))


def build_L_operators(geom, K):
    """The operators for k = 1..n, in order."""
    ops = Asym.get(geom, K).ops
    return [OperatorL(k, ops[k]) for k in range(1, geom.n + 1)]


def solve_asymptotic_expansion(geom, B, K):
    """L, chi, xi and Phi_0..Phi_B bundled as an AsymptoticData."""
    a = Asym.get(geom, K)
    return AsymptoticData(geom, a.L, a.chi, a.xi, [a.Phi(b) for b in range(B + 1)])


def compute_Phi_families(geom, p, b, K):
    """The assembled series Phi_{p;b}."""
    return Asym.get(geom, K).Phi_pb(p, b)


def compute_Phi_m_c(geom, m, c, K):
    return Asym.get(geom, K).Phi_mc(m, c)


def apply_operator(coeffs, f):
    out = QSeries.const(0, f.K)
    g = f
    for i, h in enumerate(coeffs):
        if i:
            g = g.D()
        if not h.is_zero():
            out = out + h * g
    return out


class Asym:
    _cache = {}

    def __init__(self, geom, K):
        self.geom = geom
        self.K = K
        self.hyper = Hyper.get(geom, K)
        self._phi = {}
        self._phihat = {}
        self._phipb = {}
        self._A1 = {}

    @classmethod
    def get(cls, geom, K):
        key = (geom, K)
        if key not in cls._cache:
            cls._cache[key] = cls(geom, K)
        return cls._cache[key]

    @cached_property
    def L(self):
        return solve_L(self.geom, self.K)

    @cached_property
    def Ln(self):
        return self.L ** self.geom.n

    @cached_property
    def E(self):
        g = self.geom
        return self.Ln * g.nu + g.size

    @cached_property
    def dlogL(self):
        return self.L.D() / self.L

    @cached_property
    def xi(self):
        return (self.L - 1).integrate_D()

    @cached_property
    def chi(self):
        return _chi(tuple(self.geom.a))

    def Hs(self, m, j):
        g = self.geom
        return self._Hs(m, j, g.n, g.size, g.nu)

    @cached_property
    def _Hs_cache(self):
        return {}

    def _Hs(self, m, j, n, size, nu):
        key = (m, j)
        c = self._Hs_cache
        if key not in c:
            R = _H_mj(m, j, n, size, nu)
            c[key] = ratfn_eval_at_series(R, self.Ln)
        return c[key]

    @cached_property
    def ops(self):
        g = self.geom
        n, s = g.n, g.size
        Ln, chi = self.Ln, self.chi
        out = {}
        for k in range(1, n + 1):
            row = []
            for i in range(k + 1):
                h = self.Hs(n - i, k - i) * Ln * math.comb(n, i)
                acc = QSeries.const(0, self.K)
                for r in range(k - i + 1):
                    if r > s or not chi[r]:
                        continue
                    if s - r < 0:
                        continue
                    acc = acc + self.Hs(s - i - r, k - i - r) * (math.comb(s - r, i) * chi[r])
                row.append(h - (Ln - 1) * acc)
            out[k] = row
        return out

    @cached_property
    def Phi0(self):
        g = self.geom
        base = (self.E / g.n).inverse().pow_rational(mpq(1, 2))
        return base * self.L.pow_rational(mpq(g.l + 1, 2))

    def Phi(self, b):
        if b < 0:
            return QSeries.const(0, self.K)
        if b in self._phi:
            return self._phi[b]
        if b == 0:
            res = self.Phi0
        else:
            n = self.geom.n
            rhs = QSeries.const(0, self.K)
            Linv = self.L.inverse()
            for k in range(2, n + 1):
                if b + 1 - k < 0:
                    break
                rhs = rhs + Linv ** (k - 1) * apply_operator(self.ops[k], self.Phi(b + 1 - k))
            g0 = self.Phi0
            integrand = -rhs / (self.E * g0)
            if integrand[0]:
                raise ObstructionNonzero(f"constant term {integrand[0]} at b={b}")
            res = g0 * integrand.integrate_D()
        self._phi[b] = res
        return res

    def _S(self, p):
        acc = QSeries.const(0, self.K)
        for r in range(0, p + 1):
            I = self.hyper.Ic(r)
            acc = acc + I.D() / I
        return acc

    def Phihat(self, p, b):
        """The hatted family, p any integer."""
        if b < 0:
            return QSeries.const(0, self.K)
        key = (p, b)
        if key in self._phihat:
            return self._phihat[key]
        if p == 0:
            res = self.Phi(b)
        elif p > 0:
            prev = self.Phihat(p - 1, b)
            low = self.Phihat(p - 1, b - 1)
            res = self.L * prev + low.D() - self._S(p - 1) * low
        else:
            nxt = self.Phihat(p + 1, b)
            low = self.Phihat(p, b - 1)
            res = (nxt - low.D() + self._S(p) * low) / self.L
        self._phihat[key] = res
        return res

    def Phi_pb(self, p, b):
        if b < 0:
            return QSeries.const(0, self.K)
        key = (p, b)
        if key in self._phipb:
            return self._phipb[key]
        g = self.geom
        l, nu = g.l, g.nu
        if nu == 0:
            res = self.Phihat(p - l, b)
        else:
            h = self.hyper
            res = QSeries.const(0, self.K)
            for d in range(0, p // nu + 1):
                if d > self.K:
                    break
                for s in range(0, p - nu * d + 1):
                    x = h.ctilde(p, s, d)
                    if not x:
                        continue
                    bb = b - (p - nu * d - s)
                    if bb < 0:
                        continue
                    res = res + self.Phihat(s - l, bb).shift(d) * x
        self._phipb[key] = res
        return res

    def A1(self, p):
        if p in self._A1:
            return self._A1[p]
        P = self.Phi0
        acc = P.D() / P * p + self.dlogL * mpq(p * (p - 1), 2)
        for r in range(0, p + 1):
            I = self.hyper.Ic(r)
            acc = acc - I.D() / I * (p - r)
        res = acc / self.L
        self._A1[p] = res
        return res

    def Phi_mc(self, m, c):
        """c maps r >= 1 to multiplicities (dict or tuple indexed from r = 1)."""
        if not isinstance(c, dict):
            c = {r: x for r, x in enumerate(c, 1) if x}
        size = sum(c.values())
        I0 = self.hyper.Ic(0)
        P0 = self.Phi0
        res = P0 * P0 / (I0 * I0) * ((-1) ** (m + size) * math.factorial(m + size))
        for r, cr in c.items():
            if cr:
                base = self.Phi(r) / (P0 * math.factorial(r + 1))
                res = res * base**cr / math.factorial(cr)
        return res


def A1_projective(geom, K, p):
    """Closed form of the first correction for a projective space."""
    a = Asym.get(geom, K)
    return a.dlogL / a.L * mpq(-(geom.n - p) * p, 2)


def appendix_b_oracles(which, *args, strict=True, **kwargs):
    """Evaluate both sides of one combinatorial identity; returns (lhs, rhs).

    `which` is one of: vandermonde, alternating, binomial_series, power_sums,
    L_binomial, L_dlog, pair_sum, fourfold_sum, twisted_sum.
    """
    from . import identities as ids

    table = {
        "vandermonde": ids.b1_vandermonde,
        "alternating": ids.b1_alternating,
        "binomial_series": ids.b1_binomial_series,
        "power_sums": lambda r1, r2, b1, b2: (ids.b3_oracle(r1, r2, b1, b2), ids.b3_closed(r1, r2, b1, b2)),
        "L_binomial": ids.b4_pair,
        "L_dlog": ids.b5_pair,
        "pair_sum": ids.b6_pair,
        "fourfold_sum": ids.b7_pair,
        "twisted_sum": ids.b8_pair,
    }
    if which not in table:
        raise ValueError(f"unknown identity {which!r}")
    lhs, rhs = table[which](*args, **kwargs)
    if strict and lhs != rhs:
        raise IdentityViolation(f"{which}{args}: {lhs!r} != {rhs!r}")
    return lhs, rhs
