"""Self-checks: each identity is evaluated by two independent computations and compared exactly."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

from gmpy2 import mpq

from .asym import Asym, IdentityViolation, apply_operator, solve_L
from .brackets import bracket_decompose, compositions, gbinom
from .hyper import Hyper
from .series import QSeries, wl_apply_D, wl_apply_M


@dataclass
class SuiteReport:
    name: str
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self):
        return not self.failures

    def expect(self, label, lhs, rhs):
        self.checks += 1
        if lhs != rhs:
            self.failures.append((label, lhs, rhs))

    def raise_if_failed(self):
        if self.failures:
            label, lhs, rhs = self.failures[0]
            raise IdentityViolation(f"{self.name}: {label}: {lhs!r} != {rhs!r}")
        return self


def _series_eq(a, b):
    K = min(a.K, b.K)
    return all(a[d] == b[d] for d in range(K + 1))


def _wl_eq(a, b):
    hi = min(a.hi, b.hi)
    keys = {e for e in list(a.t) + list(b.t) if e <= hi}
    return all(_series_eq(a.coeff(e), b.coeff(e)) for e in keys)


# ---------------------------------------------------------------- I-series of Calabi-Yau geometries


def check_i_series(geom, K):
    """Palindromy of the I-series together with their product identities, for |a| = n."""
    rep = SuiteReport(f"i-series {geom.label()}")
    if geom.nu != 0:
        raise ValueError("I-series identities need |a| = n")
    h = Hyper.get(geom, K)
    L = solve_L(geom, K)
    top = geom.n - geom.l
    Is = [h.Ic(p) for p in range(top + 1)]
    for p in range(top + 1):
        rep.expect(f"I_{top - p} = I_{p}", Is[top - p].c, Is[p].c)
    prod_all = QSeries.const(1, K)
    weighted = QSeries.const(1, K)
    for p, I in enumerate(Is):
        prod_all = prod_all * I
        weighted = weighted * I ** (top - p)
    rep.expect("product of all I", prod_all.c, (L ** geom.n).c)
    rep.expect("weighted product", (weighted * weighted).c, (L ** (geom.n * top)).c)
    rep.expect("I_1 = 1 + DJ", Is[1].c, (1 + h.J.D()).c)
    return rep


def _S_product(h, c):
    acc = QSeries.const(1, h.K)
    for j in range(1, c):
        acc = acc * h.Ic(j) ** (c - j)
    return acc


def _S_logderiv(h, c):
    acc = QSeries.const(0, h.K)
    for j in range(1, c):
        I = h.Ic(j)
        acc = acc + I.D() / I * (c - j)
    return acc


def check_s_reflection(geom, K):
    """Reflection identity for the logarithmic derivatives of the S-products, |a| = n."""
    rep = SuiteReport(f"s-reflection {geom.label()}")
    if geom.nu != 0:
        raise ValueError("reflection identity needs |a| = n")
    h = Hyper.get(geom, K)
    top = geom.n - geom.l
    q = QSeries.q(K)
    A = geom.a_pow_a
    I0 = h.Ic(0)
    X = q * A / (1 - q * A) - I0.D() / I0 * 2
    for c in range(top + 1):
        S = _S_product(h, c)
        rep.expect(f"dlog S_{c} two ways", (S.D() / S).c, _S_logderiv(h, c).c)
        rhs = _S_logderiv(h, top - c) - X * mpq(top - 2 * c, 2)
        rep.expect(f"reflection c={c}", _S_logderiv(h, c).c, rhs.c)
    return rep


def check_D_equals_M(geom, K):
    """Iterating D and M on the normalized series agree for the first l steps."""
    rep = SuiteReport(f"D=M {geom.label()}")
    h = Hyper.get(geom, K)
    dd = mm = h.F0
    for p in range(1, geom.l + 1):
        dd = wl_apply_D(dd)
        mm = wl_apply_M(mm)
        rep.expect(f"p={p}", _wl_eq(dd, mm), True)
    rep.expect("l-fold D of F0 is F", _wl_eq(dd, h.F), True)
    return rep


# ---------------------------------------------------------------- asymptotic expansion


def check_asymptotics(geom, K, B=4):
    """Defining equation of L, the first-order ODE for Phi_0, closed forms, and the full residual."""
    rep = SuiteReport(f"asymptotics {geom.label()}")
    a = Asym.get(geom, K)
    n, s, nu, l = geom.n, geom.size, geom.nu, geom.l
    q = QSeries.q(K)
    L, Ln, E = a.L, a.Ln, a.E
    rep.expect("L equation", (Ln - q * geom.a_pow_a * L**s).c, QSeries.const(1, K).c)
    rep.expect("1 + D xi = L", (1 + a.xi.D()).c, L.c)
    rep.expect("dlog L", a.dlogL.c, ((Ln - 1) / E).c)
    rep.expect("first operator kills Phi_0", apply_operator(a.ops[1], a.Phi0).is_zero(), True)
    h0 = (Ln - 1) * (Ln * mpq(nu * n, 2) / E - mpq(l + 1, 2)) / E
    rep.expect("first operator, D^1 part", a.ops[1][1].c, E.c)
    rep.expect("first operator, D^0 part", a.ops[1][0].c, (E * h0).c)
    if nu == 0:
        closed = (1 - q * geom.a_pow_a).pow_rational(mpq(-(l + 1), 2 * n))
        rep.expect("Phi_0 closed form", a.Phi0.c, closed.c)
    if s == 0:
        closed = (1 + q).pow_rational(mpq(-(n - 1), 2 * n))
        rep.expect("Phi_0 closed form", a.Phi0.c, closed.c)
    for b in range(B + 1):
        rep.expect(f"Phi_{b}(0)", a.Phi(b)[0], mpq(1 if b == 0 else 0))
    res = ode_residual(geom, K, B)
    for e in range(n - B, n + 1):
        rep.expect(f"residual w^{e}", res.get(e, QSeries.const(0, K)).is_zero(), True)
    return rep


def _tilde_D(L, X):
    out = {}
    for e, f in X.items():
        for ee, v in ((e + 1, L * f), (e, f.D())):
            out[ee] = out[ee] + v if ee in out else v
    return out


def _lin(X, Y, alpha=1, beta=1):
    out = {e: f * alpha for e, f in X.items()}
    for e, f in Y.items():
        out[e] = out[e] + f * beta if e in out else f * beta
    return out


def ode_residual(geom, K, B):
    """Apply the twisted Picard-Fuchs operator to sum_b Phi_b w^(-b); returns exponent -> series."""
    a = Asym.get(geom, K)
    L = a.L
    X = {-b: a.Phi(b) for b in range(B + 1)}
    Y = X
    for _ in range(geom.n):
        Y = _tilde_D(L, Y)
    P = X
    for ak in geom.a:
        for r in range(1, ak + 1):
            P = _lin(_tilde_D(L, P), P, ak, r)
    q = QSeries.q(K)
    out = dict(Y)
    for e, f in X.items():
        out[e + geom.n] = out.get(e + geom.n, QSeries.const(0, K)) - f
    for e, f in P.items():
        out[e + geom.nu] = out.get(e + geom.nu, QSeries.const(0, K)) - q * f
    return out


# ---------------------------------------------------------------- combinatorial identities


def b1_vandermonde(bs, bprime):
    lhs = sum(
        math.prod(math.comb(b, x) for b, x in zip(bs, parts))
        for parts in compositions(bprime, len(bs))
    )
    return lhs, math.comb(sum(bs), bprime)


def b1_alternating(B, p, s):
    lhs = sum(
        (-1) ** b * math.comb(p, b) * math.prod(t + b for t in range(B - s + 1, B + 1))
        for b in range(p + 1)
    )
    rhs = (-1) ** p * math.factorial(s) * (math.comb(B, s - p) if s >= p else 0)
    return lhs, rhs


def b1_binomial_series(m, K):
    x = QSeries.q(K)
    lhs = QSeries([(-1) ** p * math.comb(m + p, p) for p in range(K + 1)])
    rhs = (1 + x) ** -(m + 1)
    return lhs, rhs


def power_sum_in_elementary(k, n):
    """Power sum of n variables as a polynomial in sign-modified elementary symmetric functions.

    Returned as {exponent tuple of length n: coefficient}, computed by Newton's recursion.
    """
    w = {0: {(0,) * n: n}}
    for j in range(1, k + 1):
        acc = {}
        for r in range(1, min(j - 1, n) + 1):
            for mono, c in w[j - r].items():
                key = list(mono)
                key[r - 1] += 1
                key = tuple(key)
                acc[key] = acc.get(key, 0) + c
        if j <= n:
            key = tuple(1 if i == j - 1 else 0 for i in range(n))
            acc[key] = acc.get(key, 0) + j
        w[j] = {m: c for m, c in acc.items() if c}
    return w[k]


def b3_oracle(r1, r2, b1, b2, n=None):
    n = max(r1, r2) if n is None else n
    key = [0] * n
    key[r1 - 1] += b1
    key[r2 - 1] += b2
    return power_sum_in_elementary(b1 * r1 + b2 * r2, n).get(tuple(key), 0)


def b3_closed(r1, r2, b1, b2):
    return gbinom(b1 + b2 - 1, b2) * r1 + gbinom(b1 + b2 - 1, b1) * r2


def _L_kernel(a, exp, k=1):
    """n L^exp / E^k as a series."""
    g = a.geom
    return a.L ** exp * (a.E ** (-k) if k else QSeries.const(1, a.K)) * g.n


def b4_pair(geom, d, t, K):
    a = Asym.get(geom, K)
    lhs = _L_kernel(a, geom.nu * d + geom.n * t)[d]
    return lhs, mpq(geom.a_pow_a) ** d * gbinom(d + t - 1, d)


def b5_pair(geom, d, t, k, K):
    a = Asym.get(geom, K)
    n, nu = geom.n, geom.nu
    lhs = (_L_kernel(a, nu * d + n * t, k) * a.dlogL)[d]
    acc = mpq(0)
    for r in range(d):
        acc += gbinom(k - 1 + r, r) * gbinom(d - 1 + t, d - 1 - r) * mpq(-nu, n) ** r
    return lhs, mpq(geom.a_pow_a) ** d / mpq(n) ** k * acc


def _ct(h, P, S, d):
    return h.ctilde(P, S, d)


def b6_pair(geom, d, p, K):
    """Both sides as {(tau, t): coefficient}, so the identity is checked for every f."""
    h = Hyper.get(geom, K)
    nu, A = geom.nu, geom.a_pow_a
    lhs = {}
    for d2 in range(d + 1):
        d1 = d - d2
        br, tau, brh, t = bracket_decompose(geom, p, d2)
        x = _ct(h, br, br - nu * d1, d1) * _ct(h, brh, brh - nu * d2, d2)
        if x:
            lhs[(tau, t)] = lhs.get((tau, t), 0) + x
    rhs = {}
    if d == 0:
        _, tau, _, t = bracket_decompose(geom, p, 0)
        rhs[(tau, t)] = mpq(1)
    elif d == 1:
        _, tau0, _, _ = bracket_decompose(geom, p, 0)
        _, tau1, _, t1 = bracket_decompose(geom, p, 1)
        x = -A * (1 - tau0 + tau1 - t1)
        if x:
            rhs[(tau1, t1)] = mpq(x)
    return {k: v for k, v in lhs.items() if v}, rhs


def _b7_terms(geom, d, p, t, K):
    h = Hyper.get(geom, K)
    a = Asym.get(geom, K)
    n, nu, A = geom.n, geom.nu, geom.a_pow_a
    for dv in compositions(d, 4):
        d1, d2, d3, d4 = dv
        br, tau, brh, tt = bracket_decompose(geom, p, d2 + d3)
        x = _ct(h, br, br - nu * d1, d1) * _ct(h, brh, brh - nu * d2, d2)
        if not x:
            continue
        x *= mpq(A) ** d3 * gbinom(d3 + tau - tt - t, d3)
        if not x:
            continue
        yield x, d4, _L_kernel(a, nu * d4 + n * (t - tau))


def b7_pair(geom, d, p, K):
    lhs = sum((x * ser[d4] for x, d4, ser in _b7_terms(geom, d, p, 0, K)), mpq(0))
    return lhs, mpq(1 if d == 0 else 0)


def b8_pair(geom, d, p, t, f, K):
    lhs = mpq(0)
    for x, d4, ser in _b7_terms(geom, d, p, t, K):
        lhs += x * (ser * f)[d4]
    a = Asym.get(geom, K)
    rhs = (_L_kernel(a, geom.nu * d) * f)[d]
    return lhs, rhs


def check_combinatorics(max_arg=6, b_max=5, r_max=4, K=8):
    rep = SuiteReport("combinatorics")
    for m in range(1, 4):
        for bs in itertools.product(range(max_arg + 1), repeat=m):
            for bp in range(sum(bs) + 2):
                rep.expect(f"vandermonde {bs},{bp}", *b1_vandermonde(bs, bp))
    for B in range(max_arg + 1):
        for p in range(max_arg + 1):
            for s in range(max_arg + 1):
                rep.expect(f"alternating {(B, p, s)}", *b1_alternating(B, p, s))
    for m in range(max_arg + 1):
        lhs, rhs = b1_binomial_series(m, K)
        rep.expect(f"binomial series m={m}", lhs.c, rhs.c)
    for r1 in range(1, r_max + 1):
        for r2 in range(1, r_max + 1):
            if r1 == r2:
                continue
            for b1 in range(b_max + 1):
                for b2 in range(b_max + 1 - b1):
                    if b1 + b2 == 0:
                        continue
                    rep.expect(
                        f"power sums {(r1, r2, b1, b2)}", b3_oracle(r1, r2, b1, b2), b3_closed(r1, r2, b1, b2)
                    )
    return rep


def check_L_binomials(geoms, d_max=12, t_max=3, k_max=3):
    rep = SuiteReport("L binomials")
    for g in geoms:
        for d in range(d_max + 1):
            for t in range(-t_max, t_max + 1):
                rep.expect(f"{g.label()} base d={d} t={t}", *b4_pair(g, d, t, d_max))
                for k in range(k_max + 1):
                    rep.expect(f"{g.label()} dlog d={d} t={t} k={k}", *b5_pair(g, d, t, k, d_max))
    return rep


def check_bracket_sums(geoms, d_max=4, t_max=2, K=None):
    rep = SuiteReport("bracket sums")
    K = d_max if K is None else K
    for g in geoms:
        if g.nu == 0:
            raise ValueError("bracket sums are stated for Fano geometries")
        for d in range(d_max + 1):
            for p in range(-2 * g.n, 2 * g.n + 1):
                lhs, rhs = b6_pair(g, d, p, K)
                rep.expect(f"{g.label()} pair sum d={d} p={p}", lhs, rhs)
                rep.expect(f"{g.label()} four-fold sum d={d} p={p}", *b7_pair(g, d, p, K))
                for t in range(-t_max, t_max + 1):
                    for j in range(d + 1):
                        f = QSeries.monomial(1, j, K)
                        rep.expect(f"{g.label()} twisted sum d={d} p={p} t={t} j={j}", *b8_pair(g, d, p, t, f, K))
    return rep
