import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amalgam.completion import (
    algebra_complete_within,
    automorphism_moving,
    complete_within,
    random_automorphisms,
)
from amalgam.diagrams import Diagram, diagram_of, extends
from amalgam.errors import BoundTooSmall, CatalogCoverage, KindMismatch, PreconditionFailed
from amalgam.library import abelian, cyclic, dihedral, heisenberg, small_groups
from amalgam.varieties import ABEL, GROUPS, exponent_variety, nilpotent_variety


def names(comps):
    return sorted(c.algebra.name for c in comps)


def test_group_examples():
    assert names(complete_within(Diagram.group({1}), ABEL, 1)) == ["1"]
    D = Diagram("group", {1, 2}, [("mul", (2, 2), 1)])
    assert complete_within(D, exponent_variety(3), 9) == []
    D = Diagram.group({1, 2, 3}, {(2, 2): 3})
    assert names(complete_within(D, ABEL, 4)) == ["C3", "C4"]


def test_errors():
    with pytest.raises(BoundTooSmall):
        complete_within(Diagram.group({1, 2, 3}), ABEL, 2)
    bad = Diagram("group", {1, 2, 3}, [("mul", (2, 2), 3), ("mul", (2, 2), 1)])
    with pytest.raises(PreconditionFailed):
        complete_within(bad, GROUPS, 4)
    with pytest.raises(CatalogCoverage):
        complete_within(Diagram.group({1}), nilpotent_variety(2), 16)
    with pytest.raises(KindMismatch):
        algebra_complete_within(Diagram.group({1}), "semigroup", 2)


def automorphisms(G):
    out = []
    for perm in itertools.permutations(range(G.order)):
        p = np.array(perm)
        if p[G.unit] == G.unit and np.array_equal(p[G.table], G.table[p[:, None], p[None, :]]):
            out.append(p)
    return out


def brute_classes(D, G):
    """Orbits of satisfying placements under the full automorphism group."""
    dom = list(D.domain)
    places = []
    for pts in itertools.permutations(range(G.order), len(dom)):
        loc = dict(zip(dom, pts))
        if loc[D.unit] != G.unit:
            continue
        ok = all(
            (G.table[loc[a[0]], loc[a[1]]] if op == "mul" else G.inverse[loc[a[0]]]) == loc[v]
            for op, a, v in D.cells
        )
        if ok:
            places.append(pts)
    auts = automorphisms(G)
    orbits = {min(tuple(int(x) for x in a[list(p)]) for a in auts) for p in places}
    return sorted(orbits)


@st.composite
def small_diagrams(draw):
    G = draw(st.sampled_from([G for G in small_groups(6) if G.order >= 3]))
    k = draw(st.integers(2, 3))
    pts = [G.unit] + draw(st.lists(st.sampled_from([x for x in range(G.order) if x != G.unit]), min_size=k - 1, max_size=k - 1, unique=True))
    labels = {x: i + 1 for i, x in enumerate(pts)}
    cells = []
    for a in pts:
        for b in pts:
            c = int(G.table[a, b])
            if c in labels and draw(st.booleans()):
                cells.append(("mul", (labels[a], labels[b]), labels[c]))
    return Diagram("group", labels.values(), cells)


@settings(max_examples=40)
@given(small_diagrams())
def test_group_completions_match_brute_force(D):
    comps = complete_within(D, GROUPS, 6)
    for G in small_groups(6):
        mine = sorted(tuple(x for _, x in c.assignment) for c in comps if c.algebra is G)
        assert mine == brute_classes(D, G), G.name


def test_sampled_automorphisms_are_automorphisms():
    for G in (abelian([3, 3]), heisenberg(3), dihedral(6)):
        for a in random_automorphisms(G, 5, seed=3):
            assert sorted(a.tolist()) == list(range(G.order))
            assert np.array_equal(a[G.table], G.table[a[:, None], a[None, :]])


def test_automorphism_moving():
    G = abelian([2, 2])
    assert automorphism_moving(G, [1, 2], [2, 1]) is not None
    C4 = cyclic(4)
    assert automorphism_moving(C4, [1], [2]) is None


def test_full_table_completions_are_embeddings():
    # extensions of a full table of C3 inside groups of order <= 9
    D = diagram_of(cyclic(3))
    comps = complete_within(D, GROUPS, 9)
    assert names(comps) == ["C3", "C3+C3", "C6", "C9", "S3"]
    for c in comps:
        assert extends(D, c.approx().diagram())


def brute_pointed_semigroups(n):
    """Classes of (associative table, distinguished element 0) up to isomorphism."""
    keys = set()
    perms = [p for p in itertools.permutations(range(n)) if p[0] == 0]
    for flat in itertools.product(range(n), repeat=n * n):
        t = np.array(flat).reshape(n, n)
        ar = np.arange(n)
        if not np.array_equal(t[t[:, :, None], ar[None, None, :]], t[ar[:, None, None], t[None, :, :]]):
            continue
        best = None
        for p in perms:
            p = np.array(p)
            inv = np.argsort(p)
            key = tuple(p[t[inv[:, None], inv[None, :]]].ravel())
            best = key if best is None or key < best else best
        keys.add(best)
    return len(keys)


def test_semigroup_counts_match_brute_force():
    comps = algebra_complete_within(Diagram.semigroup({1}), "semigroup", 3)
    by_order = [sum(1 for c in comps if c.order == n) for n in (1, 2, 3)]
    assert by_order == [brute_pointed_semigroups(n) for n in (1, 2, 3)]


def test_semigroup_examples():
    D = Diagram.semigroup({1}, {(1, 1): 1})
    comps = algebra_complete_within(D, "semigroup", 1)
    assert len(comps) == 1 and comps[0].order == 1
    for c in algebra_complete_within(D, "semigroup", 3):
        assert c.algebra.is_associative()


def test_ring_examples():
    D = Diagram.ring({0, 1}, add={(1, 1): 0}, mul={(1, 1): 1})
    comps = algebra_complete_within(D, "ring", 2)
    assert len(comps) == 1
    R = comps[0].algebra
    assert R.order == 2 and R.mul[1, 1] == 1
    # rings without unit: 1 of order 1, 2 of order p, 11 of order p^2
    comps = algebra_complete_within(Diagram.ring({0}), "ring", 4)
    assert [sum(1 for c in comps if c.order == n) for n in (1, 2, 3, 4)] == [1, 2, 2, 11]
    for c in comps:
        R = c.algebra
        n = R.order
        a, b, d = np.meshgrid(range(n), range(n), range(n), indexing="ij")
        assert np.array_equal(R.mul[a, R.add[b, d]], R.add[R.mul[a, b], R.mul[a, d]])
        assert np.array_equal(R.mul[R.add[b, d], a], R.add[R.mul[b, a], R.mul[d, a]])
