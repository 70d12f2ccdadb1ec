"""Structure constants of the N-point generating function: recursive engine, tree engine, closed forms."""

from __future__ import annotations

import itertools
import math
from itertools import product as iproduct
from typing import NamedTuple

from gmpy2 import mpq

from .asym import Asym
from .brackets import bracket_decompose, compositions, gbinom, hat_decompose, integer_partitions, multinomial
from .series import ZERO, PreconditionViolated, QSeries
from .trees import MarkedTree, enumerate_trivalent_trees

__all__ = [
    "InfeasibleKey",
    "HypothesisViolated",
    "two_point_seed",
    "hat_decompose",
    "bracket_decompose",
    "SCKey",
    "sc_recursive",
    "sc_series",
    "enumerate_trivalent_trees",
    "MarkedTree",
    "sc_tree",
    "sc_closed_forms",
    "support_ok",
    "feasible_keys",
    "compare_engines",
    "compare_closed_forms",
]


class InfeasibleKey(ValueError):
    pass


class HypothesisViolated(ValueError):
    pass


def support_ok(geom, p, b, d, t):
    """Necessary support condition for a nonzero constant."""
    N = len(p)
    n, l, nu = geom.n, geom.l, geom.nu
    return sum(b) <= N - 3 and sum(p) - sum(b) + nu * d + n * t == (N - 1) * (n - 2) + 2 + l


def set_partitions(items):
    """Set partitions of a list, blocks in order of their smallest element."""
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1 :]


def _poly_mul_trunc(a, b, M):
    """Product of two lists of QSeries viewed as polynomials in an auxiliary variable, truncated at degree M."""
    out = [None] * (M + 1)
    for i, x in enumerate(a):
        if x is None:
            continue
        for j, y in enumerate(b):
            if i + j > M or y is None:
                continue
            z = x * y
            out[i + j] = z if out[i + j] is None else out[i + j] + z
    return out


class SCEngine:
    """Shared series data for both engines of one geometry, truncated at q^K."""

    _cache = {}

    def __init__(self, geom, K):
        self.geom = geom
        self.K = K
        self.asym = Asym.get(geom, K)
        self.hyper = self.asym.hyper
        self._rec = {}
        self._bracket = {}
        self._vertex = {}
        self._seed = {}

    @classmethod
    def get(cls, geom, K):
        key = (geom, K)
        if key not in cls._cache:
            cls._cache[key] = cls(geom, K)
        return cls._cache[key]

    # ---- basic series

    @property
    def cy(self):
        return self.geom.nu == 0

    def zero(self):
        return QSeries.const(0, self.K)

    def Lnd(self):
        """L^n in the Calabi-Yau case, 1 otherwise."""
        return self.asym.Ln if self.cy else QSeries.const(1, self.K)

    def seed_series(self, t):
        """The q-series whose coefficients define the two-point seed with shift t."""
        if t not in self._seed:
            a = self.asym
            I0 = self.hyper.Ic(0)
            num = a.L ** ((1 + t) * self.geom.n) if self.cy else QSeries.const(1, self.K)
            self._seed[t] = num / (I0 * I0)
        return self._seed[t]

    def Phi(self, p, b):
        if b < 0:
            return self.zero()
        return self.asym.Phi_pb(p, b)

    def _Phi_mc_budget(self, m, budget):
        """List over k <= budget of sum_{c: ||c|| = k} Phi_{m,c}."""
        out = []
        for k in range(budget + 1):
            acc = None
            for c in integer_partitions(k):
                x = self.asym.Phi_mc(m, c)
                acc = x if acc is None else acc + x
            out.append(acc)
        return out

    # ---- recursive engine

    def bracket(self, pairs, m):
        """sum over b'' and c of Phi_{m-3,c} prod_i I0^2 Phi_{p'_i; b'_i+1+b''_i} / (b''_i! L^{dn} Phi_0)."""
        key = (tuple(sorted(pairs)), m)
        if key in self._bracket:
            return self._bracket[key]
        M = m - 3
        I0 = self.hyper.Ic(0)
        scale = I0 * I0 / (self.Lnd() * self.asym.Phi0)
        poly = self._Phi_mc_budget(M, M)
        poly = list(reversed(poly))  # index j = budget left for b''
        gen = [QSeries.const(1, self.K)] + [None] * M
        for pp, bb in pairs:
            f = []
            for j in range(M + 1):
                idx = bb + 1 + j
                if idx < 0:
                    f.append(None)
                    continue
                ph = self.Phi(pp, idx)
                f.append(None if ph.is_zero() else ph * scale / math.factorial(j))
            gen = _poly_mul_trunc(gen, f, M)
        res = self.zero()
        for j in range(M + 1):
            if gen[j] is not None and poly[j] is not None:
                # poly reversed: poly[j] holds ||c|| = M - j
                res = res + gen[j] * poly[j]
        self._bracket[key] = res
        return res

    def sc_series(self, p, b, t):
        """sum_d c^{(d,t)}_{p,b} q^d through q^K; a single degree when nu > 0."""
        p, b = tuple(p), tuple(b)
        key = (p, b, t)
        if key in self._rec:
            return self._rec[key]
        res = self._sc_compute(p, b, t)
        self._rec[key] = res
        return res

    def _target_degree(self, p, b, t):
        g = self.geom
        N = len(p)
        rhs = (N - 1) * (g.n - 2) + 2 + g.l - sum(p) + sum(b) - g.n * t
        if g.nu == 0:
            return None if rhs else -1
        if rhs < 0 or rhs % g.nu:
            return False
        return rhs // g.nu

    def _sc_compute(self, p, b, t):
        g = self.geom
        n, l, nu = g.n, g.l, g.nu
        N = len(p)
        if N < 3:
            raise InfeasibleKey("structure constants need N >= 3")
        if any(x < 0 for x in b) or t < 0:
            raise InfeasibleKey("negative entries in key")
        zero = self.zero()
        if sum(b) > N - 3:
            return zero
        tgt = self._target_degree(p, b, t)
        if tgt is None or tgt is False:
            return zero
        if nu and tgt > self.K:
            raise PreconditionViolated(f"degree {tgt} exceeds truncation {self.K}")
        total = [ZERO] * (self.K + 1)
        for part in set_partitions(list(range(N - 1))):
            blocks = part + [[N - 1]]
            m = len(blocks)
            if m < 3:
                continue
            options = []
            for S in blocks:
                if len(S) == 1:
                    s = S[0]
                    ph, tp = hat_decompose(g, p[s])
                    sign = -1 if b[s] % 2 else 1
                    options.append([(ph, -1 - b[s], tp, self.seed_series(tp) * sign, None)])
                else:
                    options.append(self._child_options(p, b, S, tgt))
                if not options[-1]:
                    break
            else:
                self._accumulate(total, options, m, t, tgt)
        return QSeries(total)

    def _child_options(self, p, b, S, tgt):
        g = self.geom
        n, l, nu = g.n, g.l, g.nu
        pS = [p[s] for s in S]
        bS = [b[s] for s in S]
        opts = []
        bmax = len(S) - 2 - sum(bS)
        for pp in range(n):
            for bb in range(bmax + 1):
                base = len(S) * (n - 2) + 2 + l - sum(pS) - pp + sum(bS) + bb
                if nu == 0:
                    if base < 0 or base % n:
                        continue
                    ts = [base // n]
                else:
                    ts = [tt for tt in range(base // n + 1) if (base - n * tt) % nu == 0 and (base - n * tt) // nu <= tgt]
                for tt in ts:
                    ser = self.sc_series(tuple(pS) + (pp,), tuple(bS) + (bb,), tt)
                    if ser.is_zero():
                        continue
                    dd = None if nu == 0 else (base - n * tt) // nu
                    opts.append((pp, bb, tt, ser, dd))
        return opts

    def _accumulate(self, total, options, m, t, tgt):
        g = self.geom
        n, l, nu = g.n, g.l, g.nu
        for combo in iproduct(*options):
            pairs = [(o[0], o[1]) for o in combo]
            br = self.bracket(pairs, m)
            if br.is_zero():
                continue
            if nu == 0:
                acc = br
                for o in combo:
                    acc = acc * o[3]
                for i, x in enumerate(acc.c):
                    total[i] += x
                continue
            tsum = sum(o[2] for o in combo)
            tp = t - tsum
            val = sum(x[0] for x in pairs) - sum(x[1] for x in pairs) - (n - 2 + (m - 1) * (l + 2)) - n * tp
            if val < 0 or val % nu:
                continue
            dprime = val // nu
            rest = tgt - dprime
            coef = mpq(1)
            seeds = QSeries.const(1, self.K)
            for o in combo:
                if o[4] is None:
                    seeds = seeds * o[3]
                else:
                    rest -= o[4]
                    coef *= o[3][o[4]]
            if rest < 0 or not coef:
                continue
            total[tgt] += coef * seeds[rest] * br[dprime]

    # ---- tree engine

    def vertex_series(self, m, marks, downs, up):
        """Bracketed vertex factor before degree extraction.

        marks: tuples (p_hat_s, b_s); downs: tuples (p_hat'_e, t_{p'_e}, b'_e); up: (p'_e, b'_e) or None.
        """
        key = (m, tuple(sorted(marks)), tuple(sorted(downs)), up)
        if key in self._vertex:
            return self._vertex[key]
        P0 = self.asym.Phi0
        I0 = self.hyper.Ic(0)
        Ln = self.asym.Ln
        gen = [QSeries.const(1, self.K)] + [None] * m
        for ph, bs in marks:
            f = []
            for j in range(m + 1):
                x = self.Phi(ph, j - bs)
                f.append(None if x.is_zero() else x / (P0 * math.factorial(j)))
            gen = _poly_mul_trunc(gen, f, m)
        for ph, tp, bp in downs:
            pre = Ln**tp if (self.cy and tp) else None
            f = []
            for j in range(m + 1):
                x = self.Phi(ph, j + 1 + bp)
                if x.is_zero():
                    f.append(None)
                    continue
                x = x / (P0 * math.factorial(j))
                f.append(x * pre if pre is not None else x)
            gen = _poly_mul_trunc(gen, f, m)
        if up is not None:
            pp, bp = up
            scale = I0 * I0 / (self.Lnd() * P0)
            f = []
            for j in range(m + 1):
                x = self.Phi(pp, j - bp)
                f.append(None if x.is_zero() else x * scale / math.factorial(j))
            gen = _poly_mul_trunc(gen, f, m)
        cs = self._Phi_mc_budget(m, m)
        res = self.zero()
        for j in range(m + 1):
            if gen[j] is not None and cs[m - j] is not None:
                res = res + gen[j] * cs[m - j]
        self._vertex[key] = res
        return res

    def tree_value(self, T, p, b, d):
        """Contribution of one tree; returns a series for nu = 0 and a number otherwise."""
        g = self.geom
        n, l, nu = g.n, g.l, g.nu
        nv = T.n_vertices
        order = T.postorder()
        ms = [T.excess(v) for v in range(nv)]
        hats = [hat_decompose(g, x) for x in p]
        for (ph, tp) in hats:
            if tp:
                raise InfeasibleKey("tree engine needs all p_s >= l")
        const = [n - 3 + (ms[v] + 2) * (l + 1) for v in range(nv)]
        markpart = [sum(hats[s][0] + b[s] for s in T.marks[v]) for v in range(nv)]
        edge_bounds = [ms[v] for v in range(1, nv)]
        degree_choices = [None] if nu == 0 else list(compositions(d, nv))
        acc_series = self.zero()
        acc_num = mpq(0)
        for bprime in iproduct(*(range(x + 1) for x in edge_bounds)):
            bp = (None,) + bprime
            for dv in degree_choices:
                pprime = [None] * nv
                tv = [None] * nv
                ok = True
                for v in order:
                    lhs = markpart[v]
                    for c in T.children[v]:
                        ph, _ = hat_decompose(g, pprime[c])
                        lhs += ph - 1 - bp[c]
                    rhs = const[v] + (nu * dv[v] if nu else 0)
                    if v == 0:
                        diff = lhs - rhs
                        if diff % n:
                            ok = False
                            break
                        tv[0] = diff // n
                    else:
                        lhs += bp[v]
                        R = rhs - lhs
                        pprime[v] = R % n
                        tv[v] = (pprime[v] - R) // n
                if not ok:
                    continue
                sign = -1 if (sum(b) + sum(bprime)) % 2 else 1
                factors = []
                for v in range(nv):
                    marks = tuple((hats[s][0], b[s]) for s in T.marks[v])
                    downs = []
                    for c in T.children[v]:
                        ph, tp = hat_decompose(g, pprime[c])
                        downs.append((ph, tp, bp[c]))
                    up = None if v == 0 else (pprime[v], bp[v])
                    factors.append(self.vertex_series(ms[v], marks, tuple(downs), up))
                if nu == 0:
                    prod = factors[0]
                    for f in factors[1:]:
                        prod = prod * f
                    acc_series = acc_series + prod * sign
                else:
                    val = mpq(sign)
                    for v in range(nv):
                        val *= factors[v][dv[v]]
                        if not val:
                            break
                    acc_num += val
        return acc_series if nu == 0 else acc_num


# ---------------------------------------------------------------- public API


def two_point_seed(geom, p, p2, b, b2, d, t, K=None):
    """The seed coefficient for the index pairs (p, p2) and (b, b2)."""
    if not (b >= 0 and b + b2 == -1 and p + p2 + geom.n * t == geom.n - 1 + geom.l):
        return mpq(0)
    eng = SCEngine.get(geom, K if K is not None else max(d, 0))
    sign = -1 if b % 2 else 1
    return sign * eng.seed_series(t)[d] if d >= 0 else mpq(0)


def sc_series(geom, p, b, t=0, K=4):
    return SCEngine.get(geom, K).sc_series(tuple(p), tuple(b), t)


class SCKey(NamedTuple):
    p: tuple
    b: tuple
    d: int
    t: int = 0


def sc_recursive(geom, key, K=None):
    """A structure constant from the partition recursion; key is an SCKey."""
    p, b, d, t = key
    if len(p) != len(b):
        raise InfeasibleKey("p and b lengths differ")
    if d < 0:
        raise InfeasibleKey("negative degree")
    if any(x < 0 or x >= geom.n for x in p):
        raise InfeasibleKey("p entries must lie in [0, n)")
    if len(p) < 3:
        raise InfeasibleKey("structure constants need N >= 3")
    if any(x < 0 for x in b) or t < 0:
        raise InfeasibleKey("negative entries in key")
    if not support_ok(geom, p, b, d, t):
        return mpq(0)
    K = d if K is None else K
    return SCEngine.get(geom, K).sc_series(tuple(p), tuple(b), t)[d]


def sc_tree(geom, p, b, d, K=None):
    """The same constant (t = 0, all p_s >= l) as a sum over stable trees."""
    p, b = tuple(p), tuple(b)
    N = len(p)
    if N < 3:
        raise InfeasibleKey("structure constants need N >= 3")
    if any(x < geom.l or x >= geom.n for x in p):
        raise InfeasibleKey("tree engine needs l <= p_s < n")
    K = d if K is None else K
    if not support_ok(geom, p, b, d, 0):
        return mpq(0)
    eng = SCEngine.get(geom, K)
    if geom.nu == 0:
        acc = eng.zero()
        for T in enumerate_trivalent_trees(N):
            acc = acc + eng.tree_value(T, p, b, d)
        return acc[d]
    total = mpq(0)
    for T in enumerate_trivalent_trees(N):
        total += eng.tree_value(T, p, b, d)
    return total


# ---------------------------------------------------------------- closed forms


def _ct_hat_product(geom, eng, phats, dvec):
    out = mpq(1)
    for ph, ds in zip(phats, dvec):
        out *= eng.hyper.ctilde(ph, ph - geom.nu * ds, ds)
        if not out:
            break
    return out


def _ct_hat_total(geom, eng, phats, d):
    return sum((_ct_hat_product(geom, eng, phats, dv) for dv in compositions(d, len(phats))), mpq(0))


def closed_top_b(geom, p, b, d, t=0, K=None):
    """Constants with |b| = N - 3."""
    N = len(p)
    if sum(b) != N - 3:
        raise HypothesisViolated("closed form needs |b| = N - 3")
    if not support_ok(geom, p, b, d, t):
        return mpq(0)
    K = d if K is None else K
    eng = SCEngine.get(geom, K)
    mult = multinomial(N - 3, b)
    if geom.nu == 0:
        I0 = eng.hyper.Ic(0)
        return mult * (eng.asym.L ** (geom.n * (1 + t)) / (I0 * I0))[d]
    hats = [hat_decompose(geom, x) for x in p]
    phats = [h[0] for h in hats]
    tp = sum(h[1] for h in hats)
    A = geom.a_pow_a
    total = mpq(0)
    for d1 in range(d + 1):
        total += A**d1 * gbinom(d1 + t - tp, d1) * _ct_hat_total(geom, eng, phats, d - d1)
    return mult * total


def ct_dt(geom, eng, p, dprime, d, t):
    """The auxiliary coefficient of the four-point closed form (nu > 0, t in {0, 1})."""
    g = geom
    nu, n, l = g.nu, g.n, g.l
    a = eng.asym
    c0 = eng.hyper.ctilde(p, p - nu * d, d)
    c1 = eng.hyper.ctilde(p, p - nu * d - 1, d)
    if not c0 and not c1:
        return mpq(0)
    inner = a.L * a.A1(p - l - nu * d) * c0 + c1
    ser = a.L ** (nu * dprime + n * (1 - t)) * n / a.E * inner
    return ser[dprime]


def Ct_big(geom, eng, p, d):
    g = geom
    nu = g.nu
    A = g.a_pow_a
    total = mpq(0)
    for d1, d2, d3, d4 in compositions(d, 4):
        br, tau, brh, tt = bracket_decompose(g, p, d2 + d3)
        coef = gbinom(d3 + tau - tt, d3)
        if not coef:
            continue
        c2 = eng.hyper.ctilde(brh, brh - nu * d2, d2)
        if not c2:
            continue
        if tau not in (0, 1):
            raise HypothesisViolated("tau outside {0, 1}")
        total += A**d3 * coef * c2 * ct_dt(geom, eng, br, d4, d1, tau)
    return total


def closed_four_point(geom, p, d, K=None):
    """Four-point constants with b = 0 and t = 0."""
    g = geom
    n, l, nu = g.n, g.l, g.nu
    p = tuple(p)
    if len(p) != 4:
        raise HypothesisViolated("four-point closed form needs N = 4")
    K = d if K is None else K
    eng = SCEngine.get(g, K)
    if not support_ok(g, p, (0, 0, 0, 0), d, 0):
        return mpq(0)
    a = eng.asym
    if nu == 0:
        I0 = eng.hyper.Ic(0)
        acc = eng.zero()
        for i, j in ((0, 1), (0, 2), (1, 2)):
            pp = p[i] + p[j] + 1
            _, _, brh, _ = bracket_decompose(g, pp, 0)
            acc = acc + a.A1(brh - l)
        for x in p:
            acc = acc - a.A1(hat_decompose(g, x)[0] - l)
        return (a.L ** (n + 1) / (I0 * I0) * acc)[d]
    hats = [hat_decompose(g, x) for x in p]
    if any(h[1] for h in hats):
        raise HypothesisViolated("four-point closed form needs all p_s >= l")
    phats = [h[0] for h in hats]
    total = mpq(0)
    for d1 in range(d + 1):
        for dv in compositions(d - d1, 4):
            prodc = _ct_hat_product(g, eng, phats, dv)
            if prodc:
                for i, j in ((0, 1), (0, 2), (1, 2)):
                    sig = p[i] + p[j] + nu * (dv[i] + dv[j])
                    pp = 2 * n - 2 + l - sig
                    total += Ct_big(g, eng, pp, d1) * prodc
            for r in range(4):
                others = mpq(1)
                for s in range(4):
                    if s != r:
                        others *= eng.hyper.ctilde(phats[s], phats[s] - nu * dv[s], dv[s])
                if others:
                    total -= others * ct_dt(g, eng, phats[r], d1, dv[r], 0)
    return total


def closed_projective_ct(geom, p, dprime, d, t):
    n = geom.n
    if (d == 0 and dprime > 0 and t == 0) or (d, dprime, t) == (0, 1, 1):
        return mpq(-p * (n - p), 2 * n)
    return mpq(0)


def closed_projective_four(geom, p, d):
    n = geom.n
    if sum(p) + n * d != 3 * n - 4:
        return mpq(0)
    if d == 1:
        return mpq(min(min(x + 1, n - 1 - x) for x in p))
    return mpq(0)


def sc_closed_forms(geom, p, b, d, t, which, K=None):
    """Dispatch on which: 'degree_zero', 'top_b', 'four_point', 'projective'."""
    N = len(p)
    if which == "degree_zero":
        if d != 0:
            raise HypothesisViolated("degree-zero form needs d = 0")
        n, l = geom.n, geom.l
        return mpq(multinomial(N - 3, b)) if sum(p) + n * t == (N - 1) * (n - 1) + l and sum(b) == N - 3 else mpq(0)
    if which == "top_b":
        return closed_top_b(geom, p, b, d, t, K)
    if which == "four_point":
        if b is not None and any(b):
            raise HypothesisViolated("four-point form needs b = 0")
        return closed_four_point(geom, p, d, K)
    if which == "projective":
        if geom.a:
            raise HypothesisViolated("projective form needs empty a")
        if N != 4 or (b is not None and any(b)):
            raise HypothesisViolated("projective form covers N = 4, b = 0")
        return closed_projective_four(geom, p, d)
    raise ValueError(f"unknown closed form {which!r}")


# ---------------------------------------------------------------- cross-checks between routes


def feasible_keys(geom, N, d, t=0, p_min=None):
    """All (p, b) with |b| <= N - 3 meeting the support condition."""
    lo = geom.l if p_min is None else p_min
    for p in itertools.product(range(lo, geom.n), repeat=N):
        for bsum in range(N - 2):
            for b in compositions(bsum, N):
                if support_ok(geom, p, b, d, t):
                    yield p, b


def compare_engines(geom, Ns, D):
    """Recursion against tree sum on every feasible key; returns (keys, nonzero, mismatches)."""
    total = nonzero = 0
    bad = []
    for N in Ns:
        for d in range(D + 1):
            for p, b in feasible_keys(geom, N, d):
                r = sc_recursive(geom, SCKey(p, b, d), K=D)
                s = sc_tree(geom, p, b, d, K=D)
                total += 1
                nonzero += r != 0
                if r != s:
                    bad.append((N, d, p, b, r, s))
    return total, nonzero, bad


def compare_closed_forms(geom, D, Ns=(3, 4, 5), t_max=1):
    """Closed forms against the recursion on their domains; returns (checks, mismatches)."""
    checks = 0
    bad = []

    def cmp(label, x, y):
        nonlocal checks
        checks += 1
        if x != y:
            bad.append((label, x, y))

    for N in Ns:
        for t in range(t_max + 1):
            for p in itertools.product(range(geom.n), repeat=N):
                for b in compositions(N - 3, N):
                    for d in range(D + 1):
                        if not support_ok(geom, p, b, d, t):
                            continue
                        rec = sc_recursive(geom, SCKey(p, b, d, t), K=D)
                        cmp(("top_b", p, b, d, t), closed_top_b(geom, p, b, d, t, K=D), rec)
                        if d == 0:
                            cmp(("degree_zero", p, b, t), sc_closed_forms(geom, p, b, 0, t, "degree_zero"), rec)
    zero = (0, 0, 0, 0)
    for p in itertools.product(range(geom.l, geom.n), repeat=4):
        for d in range(D + 1):
            if not support_ok(geom, p, zero, d, 0):
                continue
            rec = sc_recursive(geom, SCKey(p, zero, d), K=D)
            cmp(("four_point", p, d), closed_four_point(geom, p, d, K=D), rec)
            if not geom.a:
                cmp(("projective", p, d), closed_projective_four(geom, p, d), rec)
    if not geom.a:
        eng = SCEngine.get(geom, D)
        for p in range(geom.n):
            for d in range(D + 1):
                for dp in range(D + 1):
                    for t in (0, 1):
                        cmp(("projective aux", p, dp, d, t), closed_projective_ct(geom, p, dp, d, t), ct_dt(geom, eng, p, dp, d, t))
    return checks, bad
