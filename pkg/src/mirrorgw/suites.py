"""Golden values and named verification suites shared by the command line and the test suite."""

from __future__ import annotations

import itertools
import random
import time
import warnings

from gmpy2 import mpq

from .bps import bps_from_gw, integrality_check
from .brackets import compositions
from .hyper import CIGeometry, HolomorphyViolation, Hyper, WeightedDegreeWarning
from .identities import (
    SuiteReport,
    check_asymptotics,
    check_bracket_sums,
    check_combinatorics,
    check_D_equals_M,
    check_i_series,
    check_L_binomials,
    check_s_reflection,
)
from .invariants import (
    DimensionMismatch,
    InvariantQuery,
    cy_four_point_series,
    cy_three_point_series,
    gw_invariant,
    proj_theorem4,
    vanishing_predicate,
)
from .structconst import SCKey, compare_closed_forms, compare_engines, sc_recursive, sc_tree
from .trees import enumerate_trivalent_trees, tree_weight_total


def geometry(n, *a):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", WeightedDegreeWarning)
        return CIGeometry(n, tuple(a))


# ---------------------------------------------------------------- golden data

CUBIC = geometry(5, 3)

# (codimensions, degree, value) on the cubic threefold
CUBIC_INVARIANTS = [
    ((3, 1, 1), 1, 18),
    ((3, 1, 1, 1), 1, 18),
    ((2, 2, 1), 1, 45),
    ((2, 2, 1, 1), 1, 45),
    ((3, 3, 1), 2, 108),
    ((3, 3, 1, 1), 2, 216),
    ((3, 2, 2), 2, 378),
    ((3, 2, 2, 1), 2, 756),
    ((2, 2, 2, 2), 2, 2187),
    ((3, 3, 3), 3, 648),
    ((3, 3, 3, 1), 3, 1944),
    ((3, 3, 2, 2), 3, 7452),
    ((3, 3, 3, 3), 4, 15552),
]

# (p, d, value) for structure constants with b = 0 on the cubic threefold
CUBIC_STRUCTURE_CONSTANTS = [
    ((1, 3, 3), 1, 6),
    ((2, 2, 3), 1, 15),
    ((1, 1, 3), 2, 36),
    ((1, 2, 2), 2, 126),
    ((1, 1, 1), 3, 216),
    ((1, 3, 3, 3), 1, 6),
    ((2, 2, 3, 3), 1, 15),
    ((1, 1, 3, 3), 2, 72),
    ((1, 2, 2, 3), 2, 252),
    ((1, 1, 1, 3), 3, 648),
    ((2, 2, 2, 2), 2, 729),
    ((1, 1, 2, 2), 3, 2484),
    ((1, 1, 1, 1), 4, 5184),
]


def _table(rows):
    return [(geometry(*g), tuple(vals)) for g, vals in rows]


# preset -> (codimensions, [(geometry, BPS numbers for d = 1, 2, ...)])
BPS_TABLES = {
    "table1": [
        (
            (2, 2, 2),
            _table(
                [
                    ((8, 8), (59021312, 821654025830400, 12197109744970010814464, 186083410628492378226388631552)),
                    ((9, 2, 7), (19133912, 52069545843672, 150771900962422866056, 448721851648931529402358688)),
                    ((9, 3, 6), (9303984, 9656915909184, 10669913703022812624, 12119013327306237518117376)),
                    ((9, 4, 5), (6536800, 4306289363200, 3019921285456823200, 2177140100777199737600000)),
                    ((10, 2, 2, 6), (7036416, 4323279882240, 2819049510852887040, 1889305224389886741405696)),
                    ((10, 2, 3, 5), (3936600, 1091194853400, 321105896368043400, 97128823290992207460000)),
                    ((10, 2, 4, 4), (3252224, 699998060544, 159942140236292096, 37565431180080918822912)),
                    ((10, 3, 3, 4), (2589408, 396151430400, 64359976334347296, 10748812573405031454720)),
                ]
            ),
        )
    ],
    "table2": [
        (
            (2, 2, 3),
            _table(
                [
                    ((9, 9), (1579510449, 506855012110118424, 174633921378662035929052320)),
                    ((10, 2, 8), (466477056, 25865899481481216, 1538349758855955308748800)),
                    ((10, 3, 7), (200848599, 3684692607275358, 72513809257771729565550)),
                    ((10, 4, 6), (122812416, 1209608310822912, 12780622639872867502080)),
                    ((10, 5, 5), (104480625, 841277146035000, 7266883194629367785000)),
                ]
            ),
        )
    ],
    "table3": [
        (
            (2, 2, 2, 2),
            _table(
                [
                    ((9, 9), (2395066806, 1718927099008463268, 957208127608222375829677128)),
                    ((10, 2, 8), (702562304, 86939314932416512, 8348345278919524413816832)),
                    ((10, 3, 7), (302321376, 12364886269091538, 392695531026064094763648)),
                    ((10, 4, 6), (184771584, 4056318495977472, 69156291871338627290112)),
                    ((10, 5, 5), (157178750, 2820556380767500, 39310596116635041745000)),
                ]
            ),
        )
    ],
    "table4": [
        ((2, 3, 3), _table([((10, 10), (51415320000, 444475303469701680000, 4089048226644406809222184680000))])),
        ((2, 2, 4), _table([((10, 10), (38922224000, 295035175517918176000, 2467449594491156931046837776000))])),
        ((2, 2, 2, 3), _table([((10, 10), (75062592000, 1394799570099498816000, 20109980886063766606715932224000))])),
    ],
}


def cy_series(geom, cs, D):
    if len(cs) == 3:
        return cy_three_point_series(geom, *cs, D)
    return cy_four_point_series(geom, *cs, D)


def bps_row(geom, cs, D):
    """(GW values, BPS values) for d = 0..D."""
    gw = cy_series(geom, cs, D)
    return gw.values, bps_from_gw(gw, len(cs)).n_values


# ---------------------------------------------------------------- suites


def suite_cubic():
    rep = SuiteReport("cubic invariants")
    for cs, d, val in CUBIC_INVARIANTS:
        q = InvariantQuery((0,) * len(cs), cs, d)
        rep.expect(f"{cs} d={d}", gw_invariant(CUBIC, q, K=d), mpq(val))
    return rep


def suite_structure_constants():
    rep = SuiteReport("cubic structure constants")
    for p, d, val in CUBIC_STRUCTURE_CONSTANTS:
        b = (0,) * len(p)
        rep.expect(f"recursion {p} d={d}", sc_recursive(CUBIC, SCKey(p, b, d), K=d), mpq(val))
        rep.expect(f"tree sum {p} d={d}", sc_tree(CUBIC, p, b, d, K=d), mpq(val))
    return rep


def suite_tables(presets=("table1", "table2", "table3", "table4"), D=3):
    rep = SuiteReport("BPS tables")
    for name in presets:
        for cs, rows in BPS_TABLES[name]:
            for geom, vals in rows:
                top = min(D, len(vals))
                _, bps = bps_row(geom, cs, top)
                for d in range(1, top + 1):
                    rep.expect(f"{name} {geom.label()} {cs} d={d}", bps[d], mpq(vals[d - 1]))
    return rep


IDENTITY_GEOMETRIES = [(5, 5), (6, 3, 3), (8, 8)]
ASYM_GEOMETRIES = [(5,), (5, 3), (5, 4), (5, 5), (6, 2, 2), (6, 3, 3), (8, 8)]


def suite_identities(K=15, B=4):
    rep = SuiteReport("identities")
    subs = []
    for g in IDENTITY_GEOMETRIES:
        geom = geometry(*g)
        subs += [check_i_series(geom, K), check_s_reflection(geom, K)]
    for g in ASYM_GEOMETRIES:
        geom = geometry(*g)
        subs += [check_D_equals_M(geom, K), check_asymptotics(geom, K, B)]
    return _merge(rep, subs)


def suite_combinatorics(d_max=12, bracket_d=4):
    rep = SuiteReport("combinatorics")
    L_geoms = [geometry(*g) for g in [(5,), (5, 3), (5, 4), (5, 5), (6, 3, 3), (8, 8)]]
    fano = [geometry(*g) for g in [(5, 3), (5, 4), (6, 2, 2)]]
    subs = [check_combinatorics(), check_L_binomials(L_geoms, d_max), check_bracket_sums(fano, bracket_d)]
    return _merge(rep, subs)


ENGINE_GEOMETRIES = [(5, 3), (5,), (5, 5), (6, 3, 3), (8, 8)]
CLOSED_FORM_GEOMETRIES = [(5, 3), (5,), (5, 5), (6, 3, 3), (5, 4), (6, 2, 2)]


def suite_engines(N_max=5, D=3, closed=True):
    rep = SuiteReport("engines")
    for g in ENGINE_GEOMETRIES:
        geom = geometry(*g)
        total, _, bad = compare_engines(geom, range(3, N_max + 1), D)
        rep.checks += total
        rep.failures += [(f"{geom.label()} {x[:4]}", x[4], x[5]) for x in bad]
    if closed:
        for g in CLOSED_FORM_GEOMETRIES:
            geom = geometry(*g)
            checks, bad = compare_closed_forms(geom, D, Ns=range(3, N_max + 1))
            rep.checks += checks
            rep.failures += [(f"{geom.label()} {x[0]}", x[1], x[2]) for x in bad]
    return rep


def suite_trees(N_max=9):
    rep = SuiteReport("trees")
    for N in range(3, N_max + 1):
        rep.expect(f"weighted count N={N}", tree_weight_total(N), (N - 2) ** (N - 2))
    rep.expect("four-point trees", len(enumerate_trivalent_trees(4)), 4)
    return rep


def _quiet_invariant(geom, q, K):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", DimensionMismatch)
        return gw_invariant(geom, q, K)


def projective_vanishing_queries(n_range=range(2, 6), N_range=range(3, 7), d_range=range(1, 4)):
    """Queries with N - 2 copies of tau_b H^(n-b) on P^n and two arbitrary slots."""
    for n in n_range:
        geom = geometry(n + 1)
        for N in N_range:
            for d in d_range:
                for b in range(1, n + 1):
                    fb, fc = (b,) * (N - 2), (n - b,) * (N - 2)
                    tot = (n + 1) * d + n + 1 - 4 + N - sum(fb) - sum(fc)
                    for c1 in range(n + 1):
                        for c2 in range(c1, n + 1):
                            r = tot - c1 - c2
                            for b1 in range(max(r + 1, 0)):
                                yield geom, InvariantQuery((b1, r - b1) + fb, (c1, c2) + fc, d)


FANO_GEOMETRIES = [(4,), (5,), (6,), (5, 2), (5, 3), (6, 2), (6, 2, 2), (6, 3), (6, 4), (7, 3)]


def random_vanishing_queries(count=200, seed=0):
    """Random queries satisfying the vanishing hypothesis on geometries with index at least 2."""
    rng = random.Random(seed)
    geoms = [geometry(*g) for g in FANO_GEOMETRIES]
    out = []
    while len(out) < count:
        g = rng.choice(geoms)
        n, l, nu = g.n, g.l, g.nu
        N = rng.randint(3, 5)
        d = rng.randint(1, 3)
        k = rng.randint(1, N)
        b, c = [], []
        for _ in range(k):
            bs = rng.randint(0, nu - 1)
            b.append(bs)
            c.append(rng.randint(0, min(nu - 1 - bs, n - 1 - l)))
        for _ in range(N - k - 1):
            b.append(rng.randint(0, 2))
            c.append(rng.randint(0, n - 1 - l))
        if N - k >= 1:
            rest = nu * d + n - 4 - l + N - sum(b) - sum(c)
            cl = rng.randint(0, n - 1 - l)
            if rest - cl < 0:
                continue
            b.append(rest - cl)
            c.append(cl)
        q = InvariantQuery(tuple(b), tuple(c), d)
        if sum(b) + sum(c) != nu * d + n - 4 - l + N:
            continue
        if not vanishing_predicate(g, q.b, q.c):
            continue
        out.append((g, q))
    return out


def suite_vanishing(count=200, seed=0, K=3):
    rep = SuiteReport("vanishing")
    for geom, q in projective_vanishing_queries():
        rep.expect(f"{geom.label()} {q}", _quiet_invariant(geom, q, K), mpq(0))
    for geom, q in random_vanishing_queries(count, seed):
        rep.expect(f"{geom.label()} {q}", _quiet_invariant(geom, q, K), mpq(0))
    return rep


def suite_projective(n_range=range(4, 9), descendant_n=range(2, 5)):
    rep = SuiteReport("projective")
    for n in n_range:
        geom = geometry(n)
        for sig in itertools.product(range(n - 1), repeat=4):
            if sum(sig) != 2 * n - 4:
                continue
            q = InvariantQuery((0,) * 4, tuple(x + 1 for x in sig), 1)
            expect = mpq(min(min(x + 1, n - 1 - x) for x in sig))
            rep.expect(f"lines n={n} {sig}", proj_theorem4(n, q), expect)
        for c in itertools.product(range(n), repeat=4):
            if sum(c) == 3 * n:
                rep.expect(f"conics n={n} {c}", proj_theorem4(n, InvariantQuery((0,) * 4, c, 2)), mpq(0))
        for d in (0, 1):
            for c in itertools.product(range(n), repeat=3):
                if sum(c) == n * d + n - 1:
                    q = InvariantQuery((0,) * 3, c, d)
                    rep.expect(f"three-point n={n} {c} d={d}", proj_theorem4(n, q), _quiet_invariant(geom, q, 2))
    for n in descendant_n:
        geom = geometry(n)
        for N in (3, 4):
            for d in range(3):
                tot = n * d + n - 4 + N
                for c in itertools.product(range(n), repeat=N):
                    r = tot - sum(c)
                    if r < 0:
                        continue
                    for b in compositions(r, N):
                        q = InvariantQuery(b, c, d)
                        rep.expect(f"descendants n={n} {q}", proj_theorem4(n, q), _quiet_invariant(geom, q, 2))
    return rep


def suite_integrality(D=10):
    rep = SuiteReport("integrality")
    for name in ("table1", "table2", "table3", "table4"):
        for cs, rows in BPS_TABLES[name]:
            for geom, _ in rows:
                gw = cy_series(geom, cs, D)
                res = integrality_check(bps_from_gw(gw, len(cs)))
                rep.checks += 1
                if not res.ok:
                    rep.failures.append((f"{geom.label()} {cs} d={res.first_failure}", res.value, "integer"))
    return rep


HOLOMORPHY_GEOMETRIES = [(5,), (5, 3), (5, 4), (5, 5), (6, 2, 2), (6, 3, 3), (8, 8), (6, 3), (7, 2, 3)]


def _holomorphic(build):
    try:
        return build().is_holomorphic()
    except HolomorphyViolation:
        return False


def suite_holomorphy(D=10):
    rep = SuiteReport("holomorphy")
    for g in HOLOMORPHY_GEOMETRIES:
        geom = geometry(*g)
        h = Hyper.get(geom, D)
        for p in range(geom.n):
            rep.expect(f"{geom.label()} F_{p}", h.Fp(p).is_holomorphic(), True)
            rep.expect(f"{geom.label()} Fhat_{p}", _holomorphic(lambda: h.Fhat(p)), True)
            rep.expect(f"{geom.label()} Fhat_({p})", _holomorphic(lambda: h.Fhat_paren(p)), True)
            if p >= geom.l:
                H = h.Fhat_paren(p)
                rep.expect(f"{geom.label()} Fhat_({p}) at q^0", {e: s[0] for e, s in H.t.items() if s[0]}, {p: 1})
    return rep


def _merge(rep, subs):
    for s in subs:
        rep.checks += s.checks
        rep.failures += [(f"{s.name}: {x[0]}",) + tuple(x[1:]) for x in s.failures]
    return rep


SUITES = {
    "identities": suite_identities,
    "combinatorics": suite_combinatorics,
    "engines": suite_engines,
    "vanishing": suite_vanishing,
    "projective": suite_projective,
    "integrality": suite_integrality,
    "trees": suite_trees,
    "holomorphy": suite_holomorphy,
    "cubic": suite_cubic,
    "structure-constants": suite_structure_constants,
    "tables": suite_tables,
}


def run_suite(name, **kwargs):
    t0 = time.perf_counter()
    rep = SUITES[name](**kwargs)
    return rep, time.perf_counter() - t0
