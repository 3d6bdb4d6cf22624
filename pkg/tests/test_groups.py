import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from amalgam.errors import GroupAxiomError
from amalgam.groups import (
    FiniteGroup,
    Morphism,
    direct_sum,
    find_embeddings,
    group_from_table,
    is_isomorphic,
    normal_subgroups,
    quotient,
    read_group,
    structure_report,
    subgroup_generated,
    subgroups,
    write_group,
)
from amalgam.library import (
    GROUP_COUNTS,
    abelian,
    alternating,
    cyclic,
    dicyclic,
    dihedral,
    heisenberg,
    small_groups,
    symmetric,
    trivial,
)


def brute_center(G):
    return {a for a in range(G.order) if all(G.table[a, b] == G.table[b, a] for b in range(G.order))}


def brute_derived(G):
    comms = {int(G.table[G.table[G.inverse[a], G.inverse[b]], G.table[a, b]]) for a in range(G.order) for b in range(G.order)}
    return set(subgroup_generated(G, comms))


def test_table_examples():
    assert group_from_table([[0]], 0).order == 1
    C2 = group_from_table([[0, 1], [1, 0]], 0)
    assert C2.exponent == 2
    with pytest.raises(GroupAxiomError):
        group_from_table([[0, 1], [0, 1]], 0)


def test_subgroup_generated_examples():
    C4 = cyclic(4)
    assert subgroup_generated(C4, []) == {C4.unit}
    assert subgroup_generated(C4, [2]) == {0, 2}
    S3 = symmetric(3)
    transposition = next(x for x in range(6) if S3.element_orders[x] == 2)
    three_cycle = next(x for x in range(6) if S3.element_orders[x] == 3)
    assert len(subgroup_generated(S3, [transposition, three_cycle])) == 6


def test_structure_examples():
    A = abelian([2, 4])
    r = structure_report(A)
    assert r.lower_series[1] == {A.unit} and r.upper_series[1] == set(range(8)) and r.nilpotency_class == 1
    assert structure_report(trivial()).nilpotency_class == 0
    H = heisenberg(3)
    assert H.order == 27 and H.exponent == 3
    assert len(H.gamma(2)) == 3 and H.gamma(2) == H.center == H.zeta(1)
    assert H.nilpotency_class == 2
    S3 = symmetric(3)
    assert len(S3.derived) == 3 and S3.center == {S3.unit} and S3.nilpotency_class is None


@pytest.mark.parametrize("G", small_groups(12), ids=lambda G: G.name)
def test_center_and_derived_match_brute_force(G):
    assert set(G.center) == brute_center(G)
    assert set(G.derived) == brute_derived(G)


def test_library_counts_by_order():
    # number of isomorphism classes of groups of order n
    oeis = [1, 1, 1, 2, 1, 2, 1, 5, 2, 2, 1, 5, 1, 2, 1]
    groups = small_groups(15)
    for n in range(1, 16):
        found = [G for G in groups if G.order == n]
        assert len(found) == oeis[n - 1] == GROUP_COUNTS[n]
        for a, b in itertools.combinations(found, 2):
            assert not is_isomorphic(a, b)


def test_named_groups():
    assert dihedral(4).order == 8 and dicyclic(2).order == 8
    assert not is_isomorphic(dihedral(4), dicyclic(2))
    assert alternating(4).order == 12 and len(alternating(4).center) == 1
    # the quaternion group has a single involution
    Q = dicyclic(2)
    assert int(np.sum(Q.element_orders == 2)) == 1


def test_direct_sum_examples():
    assert is_isomorphic(direct_sum(cyclic(5), trivial()), cyclic(5))
    K = direct_sum(cyclic(2), cyclic(2))
    assert K.exponent == 2 and K.order == 4
    H = heisenberg(3)
    S = direct_sum(H, H)
    for i in (1, 2, 3):
        expected = {g * H.order + h for g in H.gamma(i) for h in H.gamma(i)}
        assert set(S.gamma(i)) == expected


def test_quotient_examples():
    G = dihedral(4)
    Q, pi = quotient(G, {G.unit})
    assert is_isomorphic(Q, G)
    Q, _ = quotient(cyclic(4), {0, 2})
    assert is_isomorphic(Q, cyclic(2))
    A = direct_sum(cyclic(4), cyclic(2))
    N = subgroup_generated(A, [2 * 2 + 1])  # the element (2, 1)
    Q, pi = quotient(A, N)
    assert is_isomorphic(Q, cyclic(4))
    assert Q.element_orders[pi(1 * 2 + 0)] == 4


def test_embedding_examples():
    S3 = symmetric(3)
    assert any(m.as_tuple() == tuple(range(6)) for m in find_embeddings(S3, S3))
    assert find_embeddings(cyclic(2), cyclic(3)) == []
    assert len(find_embeddings(cyclic(2), S3)) == 3


def test_embeddings_match_permutation_search():
    # every injective homomorphism found by brute force over all maps
    G, H = cyclic(4), direct_sum(cyclic(4), cyclic(2))
    brute = set()
    for images in itertools.permutations(range(H.order), G.order):
        ok = all(images[int(G.table[a, b])] == H.table[images[a], images[b]] for a in range(4) for b in range(4))
        if ok:
            brute.add(images)
    assert {m.as_tuple() for m in find_embeddings(G, H)} == brute


def test_subgroup_lattice_counts():
    # subgroup counts: S3 has 6, D4 has 10, Q8 has 6, C2^3 has 16
    assert len(subgroups(symmetric(3))) == 6
    assert len(subgroups(dihedral(4))) == 10
    assert len(subgroups(dicyclic(2))) == 6
    assert len(subgroups(abelian([2, 2, 2]))) == 16
    assert len(normal_subgroups(dihedral(4))) == 6


def test_morphism_rejects_non_homomorphism():
    with pytest.raises(Exception):
        Morphism(cyclic(3), cyclic(3), [0, 2, 2])


@given(st.lists(st.sampled_from([2, 3, 4, 5]), min_size=1, max_size=3))
def test_abelian_groups_behave(factors):
    G = abelian(factors)
    assert G.order == int(np.prod(factors))
    assert G.is_abelian() and G.nilpotency_class == (0 if G.order == 1 else 1)
    assert G.exponent == int(np.lcm.reduce(factors))
    assert is_isomorphic(read_group(write_group(G)), G)


@given(st.sampled_from(small_groups(8)), st.sampled_from(small_groups(8)))
def test_series_are_monotone_chains(G, H):
    S = direct_sum(G, H)
    lower = structure_report(S).lower_series
    for a, b in zip(lower, lower[1:]):
        assert b <= a and S.is_normal(b)
    upper = structure_report(S).upper_series
    for a, b in zip(upper, upper[1:]):
        assert a <= b and S.is_normal(a)
    if len(upper) > 1:
        assert set(upper[1]) == set(S.center)


def test_random_tables_relabel_consistently():
    rng = np.random.default_rng(7)
    G = dihedral(5)
    perm = rng.permutation(G.order)
    inv = np.argsort(perm)
    table = perm[G.table[inv[:, None], inv[None, :]]]
    H = FiniteGroup(table, int(perm[G.unit]))
    assert is_isomorphic(G, H) and H.fingerprint == G.fingerprint
