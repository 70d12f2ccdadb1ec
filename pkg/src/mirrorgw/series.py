"""Exact truncated power series in q and Laurent expansions in w, with rational-function helpers."""

from __future__ import annotations

from fractions import Fraction
from functools import reduce

from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)


class SeriesError(ArithmeticError):
    pass


class DivisionByNonUnit(SeriesError):
    pass


class PreconditionViolated(SeriesError):
    pass


class NotHolomorphicAtZero(SeriesError):
    pass


class NonUnitEvaluation(SeriesError):
    pass


class SingularEvaluation(SeriesError):
    pass


def to_q(x):
    """Coerce int, str, Fraction or mpq to mpq."""
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, str):
        num, _, den = x.partition("/")
        return mpq(int(num), int(den or 1))
    return mpq(x)


def fmt_q(x):
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


class QSeries:
    """Truncated series sum_{d<=K} c_d q^d with rational coefficients."""

    __slots__ = ("c",)

    def __init__(self, coeffs, K=None):
        c = [to_q(x) for x in coeffs]
        if K is not None:
            c = (c + [ZERO] * (K + 1 - len(c)))[: K + 1]
        if not c:
            raise PreconditionViolated("empty series")
        self.c = tuple(c)

    @classmethod
    def _raw(cls, coeffs):
        s = object.__new__(cls)
        s.c = tuple(coeffs)
        return s

    @classmethod
    def const(cls, x, K):
        return cls._raw([to_q(x)] + [ZERO] * K)

    @classmethod
    def monomial(cls, x, d, K):
        c = [ZERO] * (K + 1)
        if d <= K:
            c[d] = to_q(x)
        return cls._raw(c)

    @classmethod
    def q(cls, K):
        return cls.monomial(1, 1, K)

    @property
    def K(self):
        return len(self.c) - 1

    def __getitem__(self, d):
        if d < 0:
            return ZERO
        if d > self.K:
            raise PreconditionViolated(f"coefficient q^{d} beyond truncation {self.K}")
        return self.c[d]

    def __iter__(self):
        return iter(self.c)

    def __repr__(self):
        return "QSeries([" + ", ".join(fmt_q(x) for x in self.c) + "])"

    def __eq__(self, other):
        if isinstance(other, QSeries):
            k = min(self.K, other.K)
            return self.c[: k + 1] == other.c[: k + 1]
        return NotImplemented

    def __hash__(self):
        return hash(self.c)

    def is_zero(self):
        return not any(self.c)

    def truncate(self, K):
        if K > self.K:
            raise PreconditionViolated("cannot extend truncation")
        return QSeries._raw(self.c[: K + 1])

    def _coerce(self, other):
        if isinstance(other, QSeries):
            return other
        return QSeries.const(other, self.K)

    def __add__(self, other):
        o = self._coerce(other)
        return QSeries._raw(a + b for a, b in zip(self.c, o.c))

    __radd__ = __add__

    def __neg__(self):
        return QSeries._raw(-a for a in self.c)

    def __sub__(self, other):
        o = self._coerce(other)
        return QSeries._raw(a - b for a, b in zip(self.c, o.c))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            x = to_q(other)
            return QSeries._raw(a * x for a in self.c)
        K = min(self.K, other.K)
        a, b = self.c, other.c
        out = [ZERO] * (K + 1)
        for i in range(K + 1):
            ai = a[i]
            if ai:
                for j in range(K + 1 - i):
                    bj = b[j]
                    if bj:
                        out[i + j] += ai * bj
        return QSeries._raw(out)

    __rmul__ = __mul__

    def inverse(self):
        a = self.c
        if not a[0]:
            raise DivisionByNonUnit("constant term vanishes")
        K = self.K
        inv0 = 1 / a[0]
        out = [inv0] + [ZERO] * K
        for k in range(1, K + 1):
            s = ZERO
            for j in range(1, k + 1):
                if a[j]:
                    s += a[j] * out[k - j]
            out[k] = -s * inv0
        return QSeries._raw(out)

    def __truediv__(self, other):
        if isinstance(other, QSeries):
            return self * other.inverse()
        x = to_q(other)
        if not x:
            raise DivisionByNonUnit("division by zero scalar")
        return QSeries._raw(a / x for a in self.c)

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, e):
        if isinstance(e, int):
            if e < 0:
                return self.inverse() ** (-e)
            res = QSeries.const(1, self.K)
            base = self
            while e:
                if e & 1:
                    res = res * base
                e >>= 1
                if e:
                    base = base * base
            return res
        return self.pow_rational(e)

    def shift(self, k):
        """Multiply by q^k, k >= 0."""
        return QSeries._raw(([ZERO] * k + list(self.c))[: self.K + 1])

    def D(self):
        """q d/dq."""
        return QSeries._raw(d * a for d, a in enumerate(self.c))

    def integrate_D(self):
        """Inverse of D on series without constant term; integration constant zero."""
        if self.c[0]:
            raise PreconditionViolated("integrate_D needs vanishing constant term")
        return QSeries._raw([ZERO] + [a / d for d, a in enumerate(self.c) if d])

    def exp(self):
        if self.c[0]:
            raise PreconditionViolated("exp needs vanishing constant term")
        a = self.c
        K = self.K
        out = [ONE] + [ZERO] * K
        for k in range(1, K + 1):
            s = ZERO
            for j in range(1, k + 1):
                if a[j]:
                    s += j * a[j] * out[k - j]
            out[k] = s / k
        return QSeries._raw(out)

    def log(self):
        if self.c[0] != 1:
            raise PreconditionViolated("log needs constant term 1")
        return (self.D() / self).integrate_D()

    def pow_rational(self, r):
        """self**r for rational r, constant term 1."""
        r = to_q(r)
        a = self.c
        if a[0] != 1:
            raise PreconditionViolated("rational power needs constant term 1")
        K = self.K
        out = [ONE] + [ZERO] * K
        for k in range(1, K + 1):
            s = ZERO
            for j in range(1, k + 1):
                if a[j]:
                    s += ((r + 1) * j - k) * a[j] * out[k - j]
            out[k] = s / k
        return QSeries._raw(out)

    def compose(self, inner):
        """self(inner(q)) for inner with zero constant term."""
        if inner[0]:
            raise PreconditionViolated("inner series must vanish at 0")
        K = min(self.K, inner.K)
        res = QSeries.const(self.c[K], K)
        inner = inner.truncate(K)
        for d in range(K - 1, -1, -1):
            res = res * inner + self.c[d]
        return res

    def valuation(self):
        for d, a in enumerate(self.c):
            if a:
                return d
        return None


def qs_ring_ops(a, b, which):
    """Dispatch for which in add, sub, mul, div."""
    table = {
        "add": lambda: a + b,
        "sub": lambda: a - b,
        "mul": lambda: a * b,
        "div": lambda: a / b,
    }
    return table[which]()


def qs_analytic_ops(a, which, r=None):
    """Dispatch for which in exp, log, pow_rational (exponent r), D, integrate_D."""
    table = {
        "exp": lambda: a.exp(),
        "log": lambda: a.log(),
        "pow_rational": lambda: a.pow_rational(r),
        "D": lambda: a.D(),
        "integrate_D": lambda: a.integrate_D(),
    }
    return table[which]()


def qs_revert_mirror(J):
    """Given J(q) with J(0)=0, return Jt with q = Q exp(Jt(Q)) inverting Q = q exp(J(q))."""
    if J[0]:
        raise PreconditionViolated("mirror map needs J(0) = 0")
    K = J.K
    Qs = QSeries.q(K)
    qQ = Qs
    for _ in range(K + 1):
        qQ = Qs * (-J.compose(qQ)).exp()
    return -J.compose(qQ)


def q_of_Q(J):
    """q as a series in Q, for Q = q exp(J(q))."""
    Jt = qs_revert_mirror(J)
    return QSeries.q(J.K) * Jt.exp()


class WLaurent:
    """Sum of w^e * S_e(q), exponents tracked up to the precision bound `hi` inclusive."""

    __slots__ = ("t", "hi", "K")

    def __init__(self, terms, hi, K):
        self.K = K
        self.hi = hi
        self.t = {e: s for e, s in terms.items() if e <= hi and not s.is_zero()}

    @classmethod
    def from_degree_expansions(cls, rows, hi, K):
        """rows[d] maps w-exponent to coefficient of q^d."""
        acc = {}
        for d, row in enumerate(rows):
            if d > K:
                break
            for e, x in row.items():
                if e <= hi and x:
                    acc.setdefault(e, [ZERO] * (K + 1))[d] += x
        return cls({e: QSeries._raw(v) for e, v in acc.items()}, hi, K)

    @classmethod
    def const(cls, s, hi):
        return cls({0: s}, hi, s.K)

    @property
    def w_range(self):
        lo = min(self.t) if self.t else 0
        return (lo, self.hi)

    @property
    def lo(self):
        return min(self.t) if self.t else 0

    def coeff(self, e):
        if e > self.hi:
            raise PreconditionViolated(f"w^{e} beyond precision {self.hi}")
        s = self.t.get(e)
        return s if s is not None else QSeries.const(0, self.K)

    def __getitem__(self, key):
        e, d = key
        return self.coeff(e)[d]

    def __add__(self, other):
        hi = min(self.hi, other.hi)
        out = dict(self.t)
        for e, s in other.t.items():
            out[e] = out[e] + s if e in out else s
        return WLaurent(out, hi, min(self.K, other.K))

    def __neg__(self):
        return WLaurent({e: -s for e, s in self.t.items()}, self.hi, self.K)

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, WLaurent):
            hi = min(self.hi + other.lo, other.hi + self.lo)
            out = {}
            for e1, s1 in self.t.items():
                for e2, s2 in other.t.items():
                    e = e1 + e2
                    if e > hi:
                        continue
                    p = s1 * s2
                    out[e] = out[e] + p if e in out else p
            return WLaurent(out, hi, min(self.K, other.K))
        return WLaurent({e: s * other for e, s in self.t.items()}, self.hi, self.K)

    __rmul__ = __mul__

    def truncate_w(self, hi):
        """Drop exponents above hi; the precision bound never increases."""
        return WLaurent(self.t, min(hi, self.hi), self.K)

    def shift_w(self, k):
        return WLaurent({e + k: s for e, s in self.t.items()}, self.hi + k, self.K)

    def twist(self, nu):
        """Substitute q -> q w^(-nu)."""
        if nu == 0:
            return self
        acc = {}
        for e, s in self.t.items():
            for d, x in enumerate(s.c):
                if x:
                    acc.setdefault(e - nu * d, [ZERO] * (self.K + 1))[d] += x
        return WLaurent({e: QSeries._raw(v) for e, v in acc.items()}, self.hi - nu * self.K, self.K)

    def map_q(self, f):
        return WLaurent({e: f(s) for e, s in self.t.items()}, self.hi, self.K)

    def w0(self):
        """Value at w = 0."""
        self.require_holomorphic()
        return self.coeff(0)

    def require_holomorphic(self):
        bad = [e for e in self.t if e < 0]
        if bad:
            raise NotHolomorphicAtZero(f"negative w-powers present: min exponent {min(bad)}")

    def is_holomorphic(self):
        return all(e >= 0 for e in self.t)

    def __repr__(self):
        return f"WLaurent(exponents={sorted(self.t)}, hi={self.hi}, K={self.K})"


def wl_apply_D(H):
    """H + (q/w) dH/dq."""
    terms = dict(H.t)
    for e, s in H.t.items():
        ds = s.D()
        if not ds.is_zero():
            terms[e - 1] = terms[e - 1] + ds if e - 1 in terms else ds
    return WLaurent(terms, H.hi - 1, H.K)


def wl_apply_M(H):
    """D(H / H(0, q))."""
    base = H.w0()
    if not base[0]:
        raise NonUnitEvaluation("H(0, q) is not a unit")
    inv = base.inverse()
    return wl_apply_D(H * inv)


# ---------------------------------------------------------------- polynomials


def _trim(c):
    c = list(c)
    while c and not c[-1]:
        c.pop()
    return tuple(c)


class Poly:
    """Dense univariate polynomial over Q, low degree first."""

    __slots__ = ("c",)

    def __init__(self, coeffs):
        self.c = _trim(to_q(x) for x in coeffs)

    @classmethod
    def _raw(cls, c):
        p = object.__new__(cls)
        p.c = _trim(c)
        return p

    @property
    def deg(self):
        return len(self.c) - 1

    def __bool__(self):
        return bool(self.c)

    def __eq__(self, other):
        return isinstance(other, Poly) and self.c == other.c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return "Poly([" + ", ".join(fmt_q(x) for x in self.c) + "])"

    def __add__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        n = max(len(self.c), len(other.c))
        a = self.c + (ZERO,) * (n - len(self.c))
        b = other.c + (ZERO,) * (n - len(other.c))
        return Poly._raw(x + y for x, y in zip(a, b))

    __radd__ = __add__

    def __neg__(self):
        return Poly._raw(-x for x in self.c)

    def __sub__(self, other):
        other = other if isinstance(other, Poly) else Poly([other])
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            x = to_q(other)
            return Poly._raw(a * x for a in self.c)
        if not self.c or not other.c:
            return Poly._raw(())
        out = [ZERO] * (len(self.c) + len(other.c) - 1)
        for i, a in enumerate(self.c):
            if a:
                for j, b in enumerate(other.c):
                    out[i + j] += a * b
        return Poly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, k):
        res = Poly([1])
        for _ in range(k):
            res = res * self
        return res

    def divmod(self, other):
        if not other.c:
            raise ZeroDivisionError("polynomial division by zero")
        r = list(self.c)
        dq = len(r) - len(other.c)
        if dq < 0:
            return Poly._raw(()), self
        qt = [ZERO] * (dq + 1)
        lead = other.c[-1]
        for k in range(dq, -1, -1):
            f = r[k + len(other.c) - 1] / lead
            qt[k] = f
            if f:
                for j, b in enumerate(other.c):
                    r[k + j] -= f * b
        return Poly._raw(qt), Poly._raw(r[: len(other.c) - 1])

    def derivative(self):
        return Poly._raw(i * a for i, a in enumerate(self.c) if i)

    def __call__(self, x):
        acc = ZERO
        for a in reversed(self.c):
            acc = acc * x + a
        return acc

    def eval_series(self, S):
        acc = QSeries.const(0, S.K)
        for a in reversed(self.c):
            acc = acc * S + a
        return acc

    def w_expansion(self):
        return {e: a for e, a in enumerate(self.c) if a}

    def monic(self):
        if not self.c:
            return self
        return self * (1 / self.c[-1])


def poly_gcd(a, b):
    while b:
        a, b = b, a.divmod(b)[1]
    return a.monic()


def series_expand(num, den, order):
    """Taylor coefficients of num/den about 0 up to `order`, den(0) != 0."""
    dc = den.c
    if not dc or not dc[0]:
        raise SingularEvaluation("denominator vanishes at 0")
    inv0 = 1 / dc[0]
    nc = num.c
    out = [ZERO] * (order + 1)
    for k in range(order + 1):
        s = nc[k] if k < len(nc) else ZERO
        for j in range(1, min(k, len(dc) - 1) + 1):
            if dc[j]:
                s -= dc[j] * out[k - j]
        out[k] = s * inv0
    return out


class RationalFn:
    """Reduced quotient of polynomials with monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        num = num if isinstance(num, Poly) else Poly([num])
        den = Poly([1]) if den is None else (den if isinstance(den, Poly) else Poly([den]))
        if not den:
            raise ZeroDivisionError("zero denominator")
        g = poly_gcd(num, den) if num else den
        num = num.divmod(g)[0]
        den = den.divmod(g)[0]
        lead = den.c[-1]
        self.num = num * (1 / lead)
        self.den = den * (1 / lead)

    @classmethod
    def u(cls):
        return cls(Poly([0, 1]))

    def __repr__(self):
        return f"RationalFn({self.num!r}, {self.den!r})"

    def __eq__(self, other):
        if not isinstance(other, RationalFn):
            other = RationalFn(other)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __add__(self, other):
        o = other if isinstance(other, RationalFn) else RationalFn(other)
        return RationalFn(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFn(-self.num, self.den)

    def __sub__(self, other):
        o = other if isinstance(other, RationalFn) else RationalFn(other)
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        o = other if isinstance(other, RationalFn) else RationalFn(other)
        return RationalFn(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = other if isinstance(other, RationalFn) else RationalFn(other)
        if not o.num:
            raise ZeroDivisionError("division by zero rational function")
        return RationalFn(self.num * o.den, self.den * o.num)

    def derivative(self):
        return RationalFn(
            self.num.derivative() * self.den - self.num * self.den.derivative(),
            self.den * self.den,
        )

    def u_ddu(self):
        return RationalFn.u() * self.derivative()

    def __call__(self, x):
        d = self.den(x)
        if not d:
            raise SingularEvaluation("pole at evaluation point")
        return self.num(x) / d


def ratfn_eval_at_series(R, S):
    """R(S(q)); the denominator must not vanish at S(0)."""
    den = R.den.eval_series(S)
    if not den[0]:
        raise SingularEvaluation("denominator vanishes at S(0)")
    return R.num.eval_series(S) / den


def prod(xs, start=1):
    return reduce(lambda a, b: a * b, xs, start)
