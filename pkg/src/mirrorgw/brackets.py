"""Index bookkeeping shared by the structure-constant engines and the combinatorial identities."""

from __future__ import annotations

import math
from itertools import product as iproduct
from typing import NamedTuple

from gmpy2 import mpq


class BracketData(NamedTuple):
    p_bracket: int
    tau: int
    p_hat_bracket: int
    t_small: int


def hat_decompose(geom, p):
    """Partner index and shift (p_hat, t_p) of a two-point seed."""
    n, l = geom.n, geom.l
    if p >= l:
        return n - 1 + l - p, 0
    return l - 1 - p, 1


def bracket_decompose(geom, p, d):
    """Reduced indices and their carries for degree d, as a BracketData."""
    n, l, nu = geom.n, geom.l, geom.nu
    x = p - nu * d
    br = x % n
    tau = (x - br) // n
    brh = (n - 1 + l - br) % n
    t = (n - 1 + l - br - brh) // n
    return BracketData(br, tau, brh, t)


def gbinom(x, k):
    """Generalized binomial prod_{r<k}(x - r)/k! for integer k >= 0; zero for k < 0."""
    if k < 0:
        return mpq(0)
    num = 1
    for r in range(k):
        num *= x - r
    return mpq(num, math.factorial(k))


def multinomial(total, parts):
    """(total)! / (prod parts! * (total - sum parts)!)."""
    rest = total - sum(parts)
    if rest < 0 or any(x < 0 for x in parts):
        return 0
    out = math.factorial(total) // math.factorial(rest)
    for x in parts:
        out //= math.factorial(x)
    return out


def compositions(total, k):
    """All k-tuples of nonnegative integers summing to total."""
    if k == 0:
        if total == 0:
            yield ()
        return
    if k == 1:
        yield (total,)
        return
    for first in range(total + 1):
        for rest in compositions(total - first, k - 1):
            yield (first,) + rest


def integer_partitions(total, largest=None):
    """Partitions of total as dicts part -> multiplicity."""
    if largest is None:
        largest = total
    if total == 0:
        yield {}
        return
    for part in range(min(total, largest), 0, -1):
        for rest in integer_partitions(total - part, part):
            out = dict(rest)
            out[part] = out.get(part, 0) + 1
            yield out


def bounded_tuples(bounds):
    return iproduct(*(range(b + 1) for b in bounds))
