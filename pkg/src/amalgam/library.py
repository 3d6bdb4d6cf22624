"""Constructors for standard small groups and a complete list up to order 15."""

from __future__ import annotations

import itertools
from functools import lru_cache

import numpy as np

from .groups import FiniteGroup, direct_sum

# Number of isomorphism classes of groups of order n (OEIS A000001), n = 1..15.
GROUP_COUNTS = {1: 1, 2: 1, 3: 1, 4: 2, 5: 1, 6: 2, 7: 1, 8: 5, 9: 2, 10: 2, 11: 1, 12: 5, 13: 1, 14: 2, 15: 1}
LIBRARY_MAX_ORDER = 15


def trivial() -> FiniteGroup:
    return FiniteGroup([[0]], 0, name="1")


def cyclic(n: int) -> FiniteGroup:
    a = np.arange(n)
    return FiniteGroup((a[:, None] + a[None, :]) % n, 0, name=f"C{n}")


def abelian(factors) -> FiniteGroup:
    """Direct sum of cyclic groups ``Z/d`` for ``d`` in ``factors``."""
    G = trivial()
    for d in factors:
        G = direct_sum(G, cyclic(d))
    G.name = "+".join(f"C{d}" for d in factors) if factors else "1"
    return G


def from_permutations(gens, name=None) -> FiniteGroup:
    """Group generated by permutations (tuples), elements ordered by BFS from identity."""
    degree = len(gens[0])
    ident = tuple(range(degree))
    elems = [ident]
    index = {ident: 0}
    i = 0
    while i < len(elems):
        x = elems[i]
        for g in gens:
            y = tuple(g[x[k]] for k in range(degree))  # apply x then g
            if y not in index:
                index[y] = len(elems)
                elems.append(y)
        i += 1
    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for a, x in enumerate(elems):
        for b, y in enumerate(elems):
            table[a, b] = index[tuple(y[x[k]] for k in range(degree))]
    return FiniteGroup(table, 0, name=name)


def symmetric(n: int) -> FiniteGroup:
    if n == 1:
        return trivial()
    cyc = tuple(list(range(1, n)) + [0])
    swap = tuple([1, 0] + list(range(2, n)))
    return from_permutations([swap, cyc], name=f"S{n}")


def alternating(n: int) -> FiniteGroup:
    gens = []
    for k in range(2, n):
        p = list(range(n))
        p[0], p[1], p[k] = 1, k, 0
        gens.append(tuple(p))
    return from_permutations(gens or [tuple(range(n))], name=f"A{n}")


def dihedral(n: int) -> FiniteGroup:
    """Symmetries of the n-gon, order 2n."""
    rot = tuple((i + 1) % n for i in range(n))
    ref = tuple((-i) % n for i in range(n))
    return from_permutations([rot, ref], name=f"D{n}")


def dicyclic(n: int) -> FiniteGroup:
    """Dic_n of order 4n: <a, x | a^2n = 1, x^2 = a^n, x^-1 a x = a^-1>."""
    m = 2 * n
    # elements a^i x^j, j in {0,1}; index i + m*j
    table = np.empty((2 * m, 2 * m), dtype=np.int64)
    for i, j, k, l in itertools.product(range(m), range(2), range(m), range(2)):
        if j == 0:
            e, f = (i + k) % m, l
        elif l == 0:
            e, f = (i - k) % m, 1
        else:
            e, f = (i - k + n) % m, 0
        table[i + m * j, k + m * l] = e + m * f
    return FiniteGroup(table, 0, name=f"Dic{n}")


def heisenberg(p: int) -> FiniteGroup:
    """Upper unitriangular 3x3 matrices over F_p, as triples (a, b, c)."""
    elems = list(itertools.product(range(p), repeat=3))
    index = {e: i for i, e in enumerate(elems)}
    n = len(elems)
    table = np.empty((n, n), dtype=np.int64)
    for i, (a, b, c) in enumerate(elems):
        for j, (x, y, z) in enumerate(elems):
            table[i, j] = index[((a + x) % p, (b + y) % p, (c + z + a * y) % p)]
    return FiniteGroup(table, 0, name=f"Heis{p}")


def abelian_invariant_lists(n: int) -> list[tuple[int, ...]]:
    """Invariant factor lists d1 | d2 | ... | dk with product n (d_i >= 2)."""
    out = []

    def rec(remaining, prev, acc):
        if remaining == 1:
            out.append(tuple(acc))
            return
        for d in range(2, remaining + 1):
            if remaining % d == 0 and (prev is None or d % prev == 0):
                rec(remaining // d, d, acc + [d])

    rec(n, None, [])
    # keep only valid chains: every later factor divisible by earlier ones
    return sorted(set(out))


@lru_cache(maxsize=None)
def abelian_groups_of_order(n: int) -> tuple[FiniteGroup, ...]:
    return tuple(abelian(f) for f in abelian_invariant_lists(n))


@lru_cache(maxsize=None)
def small_groups(max_order: int) -> tuple[FiniteGroup, ...]:
    """Every group of order <= max_order up to isomorphism (max_order <= 15)."""
    if max_order > LIBRARY_MAX_ORDER:
        raise ValueError(f"library is complete only through order {LIBRARY_MAX_ORDER}")
    extra = {
        6: [symmetric(3)],
        8: [dihedral(4), dicyclic(2)],
        10: [dihedral(5)],
        12: [dihedral(6), alternating(4), dicyclic(3)],
        14: [dihedral(7)],
    }
    out = []
    for n in range(1, max_order + 1):
        out.extend(abelian_groups_of_order(n))
        out.extend(extra.get(n, []))
    out[0].name = "1"
    return tuple(out)
