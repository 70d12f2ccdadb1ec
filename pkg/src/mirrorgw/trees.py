"""Stable N-marked trees, enumerated as laminar families of subsets of the first N-1 marks."""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations


@dataclass(frozen=True)
class MarkedTree:
    """Rooted at the vertex carrying the last mark.

    Vertex 0 is the root; vertex i > 0 sits above the edge cutting off splits[i - 1].
    """

    N: int
    splits: tuple
    parent: tuple
    marks: tuple
    children: tuple

    @property
    def root(self):
        return 0

    @property
    def vertices(self):
        return tuple(range(len(self.marks)))

    @property
    def edges(self):
        return tuple((self.parent[v], v) for v in range(1, len(self.marks)))

    @property
    def eta(self):
        """Mark -> vertex carrying it."""
        return {m: v for v, ms in enumerate(self.marks) for m in ms}

    @property
    def n_vertices(self):
        return len(self.marks)

    @property
    def n_edges(self):
        return len(self.splits)

    def excess(self, v):
        """Valence minus three."""
        val = len(self.children[v]) + len(self.marks[v]) + (1 if v else 0)
        return val - 3

    def postorder(self):
        out = []

        def walk(v):
            for c in self.children[v]:
                walk(c)
            out.append(v)

        walk(0)
        return out


def _compatible(s, t):
    u = s & t
    return not u or u == s or u == t


def _laminar_families(N):
    """Yield every laminar family of subsets of the first N-1 marks with sizes 2..N-2, as bitmasks."""
    cands = [
        sum(1 << i for i in c)
        for k in range(2, N - 1)
        for c in combinations(range(N - 1), k)
    ]
    m = len(cands)
    compat = [sum(1 << j for j in range(m) if _compatible(cands[i], cands[j])) for i in range(m)]
    chosen = []

    def grow(allowed):
        yield tuple(chosen)
        while allowed:
            low = allowed & -allowed
            i = low.bit_length() - 1
            allowed ^= low
            chosen.append(cands[i])
            yield from grow(allowed & compat[i])
            chosen.pop()

    yield from grow((1 << m) - 1)


def _family_weight(full, fam):
    """prod_v (valence - 3)! for the tree encoded by a laminar family."""
    sets = sorted(fam, key=lambda m: bin(m).count("1"))
    sets.append(full)
    w = 1
    for i, S in enumerate(sets):
        covered = 0
        kids = 0
        for T in reversed(sets[:i]):
            if T & S == T and not T & covered:
                covered |= T
                kids += 1
        val = kids + bin(S & ~covered).count("1") + (1 if S != full else 0)
        w *= math.factorial(val - 3)
    return w


def _build(N, family):
    fam = sorted(family, key=lambda s: (-len(s), sorted(s)))
    nv = len(fam) + 1
    parent = [-1] * nv
    for i, s in enumerate(fam):
        best = 0
        best_size = N
        for j, t in enumerate(fam):
            if j != i and s < t and len(t) < best_size:
                best, best_size = j + 1, len(t)
        parent[i + 1] = best
    children = [[] for _ in range(nv)]
    for v in range(1, nv):
        children[parent[v]].append(v)
    marks = []
    for v in range(nv):
        own = frozenset(range(N)) if v == 0 else fam[v - 1]
        covered = set()
        for c in children[v]:
            covered |= fam[c - 1]
        marks.append(tuple(sorted(own - covered)))
    return MarkedTree(
        N=N,
        splits=tuple(tuple(sorted(s)) for s in fam),
        parent=tuple(parent),
        marks=tuple(marks),
        children=tuple(tuple(c) for c in children),
    )


@lru_cache(maxsize=None)
def enumerate_trivalent_trees(N):
    """All stable N-marked trees, each in canonical form."""
    if N < 3:
        raise ValueError("stable marked trees need N >= 3")
    out = []
    for fam in _laminar_families(N):
        sets = [frozenset(i for i in range(N - 1) if m >> i & 1) for m in fam]
        out.append(_build(N, sets))
    return tuple(out)


def tree_weight_total(N):
    """Sum over trees of prod_v (valence - 3)!; equals (N-2)^(N-2)."""
    if N < 3:
        raise ValueError("stable marked trees need N >= 3")
    full = (1 << N) - 1
    return sum(_family_weight(full, fam) for fam in _laminar_families(N))
