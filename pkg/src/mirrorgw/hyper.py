"""Hypergeometric generating series of projective complete intersections and their derived transforms."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property, lru_cache

from gmpy2 import mpq

from .series import (
    ONE,
    ZERO,
    Poly,
    PreconditionViolated,
    QSeries,
    WLaurent,
    q_of_Q,
    series_expand,
    wl_apply_D,
    wl_apply_M,
)


class NotFano(ValueError):
    pass


class HolomorphyViolation(ArithmeticError):
    pass


class WeightedDegreeWarning(UserWarning):
    """Raised when sum_k k*a_k exceeds n; such geometries are still computed."""


@dataclass(frozen=True)
class CIGeometry:
    """Complete intersection of multidegree `a` in projective space with `n` homogeneous coordinates."""

    n: int
    a: tuple = ()

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        object.__setattr__(self, "a", a)
        if self.n < 1:
            raise ValueError("n must be positive")
        if any(x < 1 for x in a):
            raise ValueError("degrees must be positive")
        if sum(a) > self.n:
            raise ValueError(f"total degree {sum(a)} exceeds n={self.n}; only |a| <= n is supported")
        if self.norm_a > self.n:
            warnings.warn(
                "weighted degree exceeds n; results are computed under |a| <= n",
                WeightedDegreeWarning,
                stacklevel=2,
            )

    @property
    def l(self):
        return len(self.a)

    @property
    def size(self):
        return sum(self.a)

    @property
    def abs_a(self):
        return sum(self.a)

    @property
    def norm_a(self):
        return sum(k * x for k, x in enumerate(self.a, 1))

    @property
    def nu(self):
        return self.n - self.size

    @property
    def prod_a(self):
        return math.prod(self.a)

    @property
    def a_pow_a(self):
        return math.prod(x**x for x in self.a)

    @property
    def a_fact(self):
        return math.prod(math.factorial(x) for x in self.a)

    @property
    def is_cy(self):
        return self.nu == 0

    def label(self):
        base = f"P{self.n - 1}"
        return f"X{''.join(map(str, self.a))} in {base}" if self.a else base


def _linear(c0, c1):
    return Poly([c0, c1])


@lru_cache(maxsize=None)
def _denominator(n, d, drop_wn=False):
    """prod_{r=1}^d ((w+r)^n - w^n)."""
    res = Poly([1])
    for r in range(1, d + 1):
        f = _linear(r, 1) ** n
        if not drop_wn:
            f = f - Poly([0] * n + [1])
        res = res * f
    return res


@lru_cache(maxsize=None)
def _numerator(a, d, shifted):
    res = Poly([1])
    for ak in a:
        rng = range(0, ak * d) if shifted else range(1, ak * d + 1)
        for r in rng:
            res = res * _linear(r, ak)
    return res


def _row(geom, d, hi, shifted=False):
    num = _numerator(geom.a, d, shifted) * Poly([0] * (geom.nu * d) + [1])
    den = _denominator(geom.n, d)
    if hi < 0:
        return {}
    coeffs = series_expand(num, den, hi)
    return {e: x for e, x in enumerate(coeffs) if x}


def _hyper(geom, K, hi, shifted):
    rows = [_row(geom, d, hi, shifted) for d in range(K + 1)]
    return WLaurent.from_degree_expansions(rows, hi, K)


def build_F(geom, K_w, K_q):
    """The hypergeometric series F(w, q) expanded at w = 0 through w^K_w and q^K_q."""
    return _hyper(geom, K_q, K_w, False)


def build_F0_Fp(geom, p, K_w, K_q):
    """The p-th normalized derivative series F_p, with the w window capped at K_w."""
    return Hyper.get(geom, K_q).Fp(p).truncate_w(K_w)


def compute_I_and_J(geom, K):
    h = Hyper.get(geom, K)
    return h.I, h.J


def compute_coeff_tables(geom, K=None):
    """Return the tables c[(p, s, d)] and ct[(P, S, d)] for nu > 0."""
    if geom.nu == 0:
        raise NotFano("coefficient tables are defined only for nu > 0")
    h = Hyper.get(geom, K if K is not None else geom.n)
    return h.c_table, h.ct_table


def build_Fhat(geom, p, K_w, K_q):
    """Return (Fhat_p, Fhat_(p)) as series in (w, Q), with the w window capped at K_w."""
    h = Hyper.get(geom, K_q)
    return h.Fhat(p).truncate_w(K_w), h.Fhat_paren(p).truncate_w(K_w)


def J_closed_form(geom, I0):
    """J from its explicit hypergeometric expression; I0 supplied by the caller."""
    K = I0.K
    n, a = geom.n, geom.a
    if geom.size <= n - 2:
        return QSeries.const(0, K)
    if geom.size == n - 1:
        return QSeries.monomial(geom.a_fact, 1, K)
    c = [ZERO] * (K + 1)
    for d in range(1, K + 1):
        top = math.prod(math.factorial(x * d) for x in a)
        h = sum(mpq(x, r) for x in a for r in range(d + 1, x * d + 1))
        c[d] = mpq(top, math.factorial(d) ** n) * h
    return QSeries(c) / I0


class Hyper:
    """Per-geometry cache of the hypergeometric layer, truncated at q^K."""

    _cache = {}

    def __init__(self, geom, K):
        self.geom = geom
        self.K = K
        g = geom
        self.hi = 2 * g.n + g.nu * K + 4

    @classmethod
    def get(cls, geom, K):
        key = (geom, K)
        if key not in cls._cache:
            cls._cache[key] = cls(geom, K)
        return cls._cache[key]

    @cached_property
    def F(self):
        return _hyper(self.geom, self.K, self.hi, False)

    @cached_property
    def F0(self):
        return _hyper(self.geom, self.K, self.hi, True)

    @cached_property
    def I(self):
        g = self.geom
        one = QSeries.const(1, self.K)
        if g.size < g.n:
            return [one] * (g.n - g.l + 1)
        out = []
        H = self.F
        for c in range(g.n - g.l + 1):
            out.append(H.w0())
            if c < g.n - g.l:
                H = wl_apply_M(H)
        return out

    def Ic(self, c):
        if c < 0:
            return QSeries.const(1, self.K)
        if c < len(self.I):
            return self.I[c]
        if self.geom.size < self.geom.n:
            return QSeries.const(1, self.K)
        raise PreconditionViolated(f"I_{c} not tabulated")

    @cached_property
    def J(self):
        g = self.geom
        if g.size == g.n:
            return (self.F * self.I[0].inverse()).coeff(1)
        return J_closed_form(g, self.I[0])

    @cached_property
    def qQ(self):
        """q as a series in Q."""
        if self.geom.nu:
            return QSeries.q(self.K)
        return q_of_Q(self.J)

    # ---- coefficient tables (nu > 0)

    @cached_property
    def c_table(self):
        g = self.geom
        if g.nu == 0:
            raise NotFano("coefficient tables are defined only for nu > 0")
        top = g.n - g.l
        dmax = top // g.nu
        c = {}
        for d in range(dmax + 1):
            num = _numerator(g.a, d, False)
            den = Poly([1])
            for r in range(1, d + 1):
                den = den * _linear(r, 1) ** g.n
            for p in range(top + 1):
                ser = series_expand(num * _linear(d, 1) ** p, den, top)
                for s, x in enumerate(ser):
                    c[(p, s, d)] = x
        return c

    @cached_property
    def ct_table(self):
        """ct[(P, S, d)] with P, S >= l and S + nu*d <= P <= n."""
        g = self.geom
        l, nu = g.l, g.nu
        c = self.c_table
        ct = {}
        for p in range(g.n - l + 1):
            for d in range(p // nu + 1):
                for s in range(p - nu * d + 1):
                    val = ONE if (d == 0 and p == s) else ZERO
                    for d1 in range(d):
                        for r in range(p - nu * d1 + 1):
                            x = ct.get((l + p, l + r, d1))
                            if x:
                                val -= x * c[(r, s, d - d1)]
                    ct[(l + p, l + s, d)] = val
        return ct

    def ctilde(self, P, S, d):
        g = self.geom
        if P < g.l or S < g.l:
            return ONE if (d == 0 and P == S) else ZERO
        if d < 0 or S + g.nu * d > P:
            return ZERO
        try:
            return self.ct_table[(P, S, d)]
        except KeyError:
            raise PreconditionViolated(f"ctilde index ({P},{S},{d}) outside table") from None

    # ---- F_p

    def DF(self, s):
        return self._DF(s)

    @cached_property
    def _DF_list(self):
        return [self.F]

    def _DF(self, s):
        lst = self._DF_list
        while len(lst) <= s:
            lst.append(wl_apply_D(lst[-1]))
        return lst[s]

    def Fp(self, p):
        return self._Fp(p)

    @cached_property
    def _Fp_cache(self):
        return {}

    def _Fp(self, p):
        cache = self._Fp_cache
        if p in cache:
            return cache[p]
        g = self.geom
        l, nu = g.l, g.nu
        if p < 0:
            raise PreconditionViolated("F_p needs p >= 0")
        if p <= l:
            H = self.F0
            for _ in range(p):
                H = wl_apply_D(H)
            res = H
        elif nu == 0:
            res = wl_apply_M(self._Fp(p - 1))
        else:
            res = None
            for d in range(0, (p - l) // nu + 1):
                if d > self.K:
                    break
                for s in range(p - l - nu * d + 1):
                    x = self.ctilde(p, l + s, d)
                    if not x:
                        continue
                    term = self._DF(s).map_q(lambda S, d=d, x=x: S.shift(d) * x)
                    term = term.shift_w(-(p - l - nu * d - s))
                    res = term if res is None else res + term
        if not res.is_holomorphic():
            raise HolomorphyViolation(f"F_{p} has negative w-powers")
        cache[p] = res
        return res

    # ---- Fhat

    def _emJw(self, hi):
        """exp(-J(q) w) truncated at w^hi."""
        terms = {}
        t = QSeries.const(1, self.K)
        for k in range(hi + 1):
            terms[k] = t
            t = t * (-self.J) / (k + 1)
        return WLaurent(terms, hi, self.K)

    @cached_property
    def _Fhat_cache(self):
        return {}

    def Fhat(self, p):
        cache = self._Fhat_cache
        if p in cache:
            return cache[p]
        g = self.geom
        Fp = self._Fp(p).shift_w(p)
        if g.nu == 0:
            H = self._emJw(Fp.hi) * Fp * self.Ic(p - g.l).inverse()
            qQ = self.qQ
            H = H.map_q(lambda S: S.compose(qQ))
        else:
            H = Fp.twist(g.nu)
            if g.nu == 1:
                H = H * QSeries.monomial(-g.a_fact, 1, self.K).exp()
        if not H.is_holomorphic():
            raise HolomorphyViolation(f"Fhat_{p} has negative w-powers")
        cache[p] = H
        return H

    @cached_property
    def _Fhat_paren_cache(self):
        return {}

    def Fhat_paren(self, p):
        cache = self._Fhat_paren_cache
        if p in cache:
            return cache[p]
        g = self.geom
        den = QSeries.const(1, self.K)
        for r in range(p - g.l + 1, g.n - g.l):
            den = den * self.Ic(r)
        if g.nu == 0:
            den = den.compose(self.qQ)
        cache[p] = self.Fhat(p) * den.inverse()
        return cache[p]
