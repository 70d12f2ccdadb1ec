"""Genus-zero multiple-cover transform from GW series to BPS counts."""

from __future__ import annotations

from dataclasses import dataclass, field

from gmpy2 import mpq

from .structconst import HypothesisViolated


@dataclass
class BPSSeries:
    geometry: object
    insertions: tuple
    n_values: list = field(default_factory=list)


@dataclass
class IntegrityReport:
    ok: bool
    first_failure: int | None = None
    value: object = None


def _divisors(d):
    return [k for k in range(1, d + 1) if d % k == 0]


def bps_from_gw(gw, N):
    """Invert N_d = sum_{k | d} k^(N-3) n_{d/k} degree by degree; index 0 is copied through."""
    if N < 3:
        raise HypothesisViolated("the multiple-cover transform needs N >= 3")
    vals = [mpq(x) for x in gw.values]
    out = [vals[0] if vals else mpq(0)]
    for d in range(1, len(vals)):
        acc = vals[d]
        for k in _divisors(d)[1:]:
            acc -= mpq(k) ** (N - 3) * out[d // k]
        out.append(acc)
    return BPSSeries(gw.geometry, gw.insertions, out)


def gw_from_bps(bps, N):
    """Forward transform, used for round-trip checks."""
    vals = bps.n_values
    out = [vals[0] if vals else mpq(0)]
    for d in range(1, len(vals)):
        out.append(sum(mpq(k) ** (N - 3) * vals[d // k] for k in _divisors(d)))
    return out


def integrality_check(bps):
    for d, x in enumerate(bps.n_values):
        if d and mpq(x).denominator != 1:
            return IntegrityReport(False, d, x)
    return IntegrityReport(True)
