"""Genus-zero descendant invariants of complete intersections and the closed-form fast paths."""

from __future__ import annotations

import itertools
import math
import warnings
from dataclasses import dataclass, field
from functools import lru_cache

from gmpy2 import mpq

from .asym import Asym
from .brackets import compositions, multinomial
from .hyper import CIGeometry, Hyper
from .series import Poly, QSeries, series_expand
from .structconst import HypothesisViolated, SCEngine, support_ok


class DimensionMismatch(UserWarning):
    pass


@dataclass(frozen=True)
class InvariantQuery:
    b: tuple
    c: tuple
    d: int

    def __post_init__(self):
        object.__setattr__(self, "b", tuple(self.b))
        object.__setattr__(self, "c", tuple(self.c))
        if len(self.b) != len(self.c):
            raise ValueError("b and c must have equal length")
        if self.d < 0 or any(x < 0 for x in self.b + self.c):
            raise ValueError("negative entries in query")

    @property
    def N(self):
        return len(self.b)


@dataclass
class InvariantSeries:
    geometry: CIGeometry
    insertions: tuple
    values: list = field(default_factory=list)


def expected_dimension_ok(geom, b, c, d):
    N = len(b)
    return sum(b) + sum(c) == geom.nu * d + geom.n - 4 - geom.l + N


def gw_degree_zero(geom, b, c):
    N = len(b)
    if N < 3:
        raise HypothesisViolated("degree-zero formula needs N >= 3")
    if sum(c) != geom.n - 1 - geom.l or sum(b) != N - 3:
        return mpq(0)
    return mpq(geom.prod_a * multinomial(N - 3, b))


def _fhat_coeff(h, p, d, e):
    """[[Fhat_p]_{Q;d}]_{w;e}."""
    return h.Fhat(p).coeff(e)[d]


def _fhat_paren_series(h, p, e):
    return h.Fhat_paren(p).coeff(e)


def gw_invariant(geom, query, K=None):
    """<tau_{b_1} H^{c_1}, ..., tau_{b_N} H^{c_N}>_{0,d} of the complete intersection."""
    b, c, d = query.b, query.c, query.d
    N = query.N
    g = geom
    n, l, nu = g.n, g.l, g.nu
    if not expected_dimension_ok(g, b, c, d):
        warnings.warn(f"dimension constraint fails for {query}", DimensionMismatch, stacklevel=2)
        return mpq(0)
    if any(x > n - 1 - l for x in c):
        return mpq(0)
    K = d if K is None else max(K, d)
    p = tuple(n - 1 - x for x in c)
    if N == 1:
        return _one_point(g, b[0], p[0], d, K)
    if N == 2:
        return _two_point(g, b, p, d, K)
    if d == 0:
        return gw_degree_zero(g, b, c)
    return mpq(g.prod_a) * _multi_point(g, b, p, d, K)


def _one_point(g, b1, p1, d, K):
    if d == 0:
        return mpq(0)
    h = Hyper.get(g, K)
    return mpq(g.prod_a) * _fhat_coeff(h, g.l, d, p1)


def _S_two(g, h, b, p, d):
    """<tau_{b1+1}, tau_{b2}> + <tau_{b1}, tau_{b2+1}> without the leading factor."""
    nu = g.nu
    total = mpq(0)
    for d1 in range(d + 1):
        ds = (d1, d - d1)
        idx = [nu * ds[s] + p[s] - b[s] - 1 for s in range(2)]
        if any(nu * ds[s] < g.l + 1 + b[s] - p[s] for s in range(2)):
            continue
        if any(i >= g.n for i in idx) and nu:
            continue
        if nu:
            x = _fhat_coeff(h, idx[0], ds[0], p[0]) * _fhat_coeff(h, idx[1], ds[1], p[1])
            total += x
    if nu == 0:
        idx = [p[s] - b[s] - 1 for s in range(2)]
        if any(i < g.l for i in idx):
            return mpq(0)
        s0 = h.Fhat(idx[0]).coeff(p[0])
        s1 = h.Fhat(idx[1]).coeff(p[1])
        total = (s0 * s1)[d]
    return total


def _two_point(g, b, p, d, K):
    h = Hyper.get(g, K)
    B1, B2 = b
    total = mpq(0)
    for j in range(B1 + 1):
        sgn = -1 if j % 2 else 1
        total += sgn * _S_two(g, h, (B1 - 1 - j, B2 + j), p, d)
    return mpq(g.prod_a) * total


def _multi_point(g, b, p, d, K):
    n, l, nu = g.n, g.l, g.nu
    N = len(b)
    eng = SCEngine.get(g, K)
    h = eng.hyper
    if nu == 0:
        qQ = h.qQ
        acc = QSeries.const(0, K)
        ranges = [range(max(0, l - p[s] + b[s]), n - p[s] + b[s]) for s in range(N)]
        for bp in itertools.product(*ranges):
            if sum(bp) > N - 3:
                continue
            pp = tuple(p[s] - b[s] + bp[s] for s in range(N))
            if not support_ok(g, pp, bp, 0, 0):
                continue
            C = eng.sc_series(pp, bp, 0)
            if C.is_zero():
                continue
            term = C.compose(qQ)
            for s in range(N):
                term = term * _fhat_paren_series(h, pp[s], p[s])
            acc = acc + term
        return acc[d]
    total = mpq(0)
    for d1 in range(d + 1):
        for dv in compositions(d - d1, N):
            ranges = [
                range(max(0, l - nu * dv[s] - p[s] + b[s]), n - nu * dv[s] - p[s] + b[s])
                for s in range(N)
            ]
            for bp in itertools.product(*ranges):
                if sum(bp) > N - 3:
                    continue
                pp = tuple(nu * dv[s] + p[s] - b[s] + bp[s] for s in range(N))
                if not support_ok(g, pp, bp, d1, 0):
                    continue
                C = eng.sc_series(pp, bp, 0)[d1]
                if not C:
                    continue
                prod = C
                for s in range(N):
                    prod *= h.Fhat_paren(pp[s]).coeff(p[s])[dv[s]]
                    if not prod:
                        break
                total += prod
    return total


# ---------------------------------------------------------------- Calabi-Yau fast path


def _require_cy(geom):
    if geom.nu != 0:
        raise HypothesisViolated("Calabi-Yau formulas need |a| = n")


def _cy_prefactor(geom, cs, K):
    h = Hyper.get(geom, K)
    q = QSeries.q(K)
    den = (1 - q * geom.a_pow_a) * h.Ic(0) * h.Ic(0)
    for cc in cs:
        for j in range(1, cc + 1):
            den = den * h.Ic(j)
    return h, den.inverse() * geom.prod_a


def dlogS(h, c):
    """Logarithmic q-derivative of I_1^{c-1} I_2^{c-2} ... I_c^0."""
    acc = QSeries.const(0, h.K)
    for j in range(1, c):
        I = h.Ic(j)
        acc = acc + I.D() / I * (c - j)
    return acc


def _to_Q(h, ser):
    return ser.compose(h.qQ)


def cy_three_point_series(geom, c1, c2, c3, D):
    _require_cy(geom)
    if c1 + c2 + c3 != geom.n - 1 - geom.l or min(c1, c2, c3) < 0:
        raise HypothesisViolated("codimensions must sum to n - 1 - l")
    h, pre = _cy_prefactor(geom, (c1, c2, c3), D)
    return InvariantSeries(geom, (c1, c2, c3), list(_to_Q(h, pre)))


def _cy_curly(geom, h):
    q = QSeries.q(h.K)
    A = geom.a_pow_a
    I0 = h.Ic(0)
    return q * A / (1 - q * A) - I0.D() / I0 * 2


def cy_four_point_q(geom, cs, K, form="primary"):
    """Right-hand side of the four-point formula as a q-series."""
    _require_cy(geom)
    c1, c2, c3, c4 = cs
    if sum(cs) != geom.n - geom.l or min(cs) < 0:
        raise HypothesisViolated("codimensions must sum to n - l")
    h, pre = _cy_prefactor(geom, cs, K)
    X = _cy_curly(geom, h)
    S = lambda c: dlogS(h, c)
    body = S(c1) + S(c2) + S(c3) + S(c4)
    if form == "primary":
        body = body + X * mpq(geom.n - geom.l - 2 * c4, 2) - S(c1 + c2) - S(c1 + c3) - S(c2 + c3)
    elif form == "alternate":
        body = body + X * c1 - S(c1 + c2) - S(c1 + c3) - S(c1 + c4)
    else:
        raise ValueError(form)
    return h, pre * body


def cy_four_point_series(geom, c1, c2, c3, c4, D, form="primary"):
    h, ser = cy_four_point_q(geom, (c1, c2, c3, c4), D, form)
    return InvariantSeries(geom, (c1, c2, c3, c4), list(_to_Q(h, ser)))


def two_point_identity_series(geom, c1, K):
    """<a> I_{c1+1}/I_1 converted to Q."""
    h = Hyper.get(geom, K)
    return _to_Q(h, h.Ic(c1 + 1) / h.Ic(1) * geom.prod_a)


# ---------------------------------------------------------------- projective fast path


@lru_cache(maxsize=None)
def _proj_factor(n, ds, ps, order):
    """Taylor coefficients in w of (w + ds)^ps / prod_{r<=ds} (w + r)^n."""
    num = Poly([ds, 1]) ** ps
    den = Poly([1])
    for r in range(1, ds + 1):
        den = den * Poly([r, 1]) ** n
    return series_expand(num, den, order)


def proj_theorem4(n, query):
    """Three- and four-point descendant invariants of the projective space with n coordinates.

    Each factor contributes H^j hbar^(p - 1 - n*d - j) after expanding in w = H/hbar, so the
    psi-power b_s at a mark pins down the exponent p_s once d_s is chosen.
    """
    b, c, d = query.b, query.c, query.d
    N = len(b)
    if N not in (3, 4):
        raise HypothesisViolated("closed projective formulas cover N = 3, 4")
    if any(x > n - 1 for x in c):
        return mpq(0)
    pstar = [n - 1 - x for x in c]

    def branch(dprime, ptotal, weight_fn, shifts):
        acc = mpq(0)
        for dv in compositions(d - dprime, N):
            for shift in shifts:
                pv = [pstar[s] + n * dv[s] + (s == shift) - b[s] for s in range(N)]
                if sum(pv) != ptotal or any(x < 0 or x >= n for x in pv):
                    continue
                prod = mpq(weight_fn(pv))
                for s in range(N):
                    if not prod:
                        break
                    prod *= _proj_factor(n, dv[s], pv[s], pstar[s])[pstar[s]]
                acc += prod
        return acc

    total = mpq(0)
    if N == 3:
        for dprime in range(min(d, 1) + 1):
            total += branch(dprime, (2 - dprime) * n - 2, lambda pv: 1, [None])
        return total
    if d >= 1:
        total += branch(1, 2 * n - 4, lambda pv: min(min(x + 1, n - 1 - x) for x in pv), [None])
    for dprime in range(min(d, 2) + 1):
        total += branch(dprime, (3 - dprime) * n - 3, lambda pv: 1, list(range(N)))
    return total


# ---------------------------------------------------------------- vanishing and bounds


def vanishing_predicate(geom, b, c):
    N = len(b)
    if N < 3:
        raise HypothesisViolated("vanishing statement needs N >= 3")
    nu = geom.nu
    return sum(bs for bs, cs in zip(b, c) if bs + cs < nu) > N - 3


@dataclass
class BoundReport:
    C: float | None
    per_degree: dict
    count: int
    ratios: list


def _admissible_queries(geom, N, d):
    """One (b, c) per multiset of insertion pairs meeting the dimension constraint.

    Invariants are symmetric under permuting the pairs (b_s, c_s), so each orbit is listed once
    with the pairs in nondecreasing order.
    """
    n, l = geom.n, geom.l
    total = geom.nu * d + n - 4 - l + N
    if total < 0:
        return
    pairs = [(b, c) for b in range(total + 1) for c in range(n - l) if b + c <= total]

    def extend(start, left, budget):
        if left == 0:
            if budget == 0:
                yield ()
            return
        for i in range(start, len(pairs)):
            b, c = pairs[i]
            if b + c > budget:
                continue
            for rest in extend(i, left - 1, budget - b - c):
                yield ((b, c),) + rest

    for chosen in extend(0, N, total):
        yield tuple(x[0] for x in chosen), tuple(x[1] for x in chosen)


def bound_certificate(geom, D_max, N_max, K=None):
    """Empirical growth constant over a finite grid of invariants."""
    per_degree = {}
    count = 0
    K = D_max if K is None else K
    for d in range(D_max + 1):
        best = None
        for N in range(1, N_max + 1):
            if d == 0 and N < 3:
                continue
            for b, c in _admissible_queries(geom, N, d):
                with warnings.catch_warnings():
                    warnings.simplefilter("ignore", DimensionMismatch)
                    v = gw_invariant(geom, InvariantQuery(b, c, d), K)
                count += 1
                if not v:
                    continue
                x = abs(v) * math.prod(math.factorial(y) for y in b) / math.factorial(N)
                r = float(x) ** (1.0 / (N + d))
                best = r if best is None or r > best else best
        if best is not None:
            per_degree[d] = best
    vals = [per_degree[d] for d in sorted(per_degree)]
    ratios = [vals[i + 1] / vals[i] for i in range(len(vals) - 1) if vals[i]]
    return BoundReport(max(vals) if vals else None, per_degree, count, ratios)
