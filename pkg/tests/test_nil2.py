import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from amalgam.errors import EvenPrime, IncompatiblePredicates, TableTooLarge, WrongVariety
from amalgam.groups import FiniteGroup, Morphism, direct_sum, find_embeddings, is_isomorphic, sum_injections
from amalgam.library import abelian, cyclic, heisenberg, symmetric, trivial
from amalgam.nil2 import (
    Nil2Presentation,
    baer_group,
    embed_into_amalg_base,
    free_nil2_expp,
    is_amalgamation_base,
    nil2_amalgam,
    predicate_restrictions_hold,
    presentation_of,
    read_presentation,
    symplectic,
)


def validated(G):
    # rebuild with full axiom checking
    return FiniteGroup(G.table, G.unit)


def test_baer_examples():
    zero = Nil2Presentation(3, 2, 1, np.zeros((1, 2, 2), dtype=int))
    G = validated(baer_group(zero))
    assert G.is_abelian() and is_isomorphic(G, abelian([3, 3, 3]))
    H = validated(baer_group(symplectic(3)))
    assert H.order == 27 and H.exponent == 3 and len(H.derived) == 3
    assert is_isomorphic(H, heisenberg(3))
    E = validated(baer_group(symplectic(5)))
    assert E.order == 125 and E.exponent == 5 and E.center == E.derived and len(E.center) == 5


def test_presentation_gates():
    with pytest.raises(EvenPrime):
        symplectic(2)
    with pytest.raises(ValueError):
        Nil2Presentation(3, 2, 1, np.array([[[1, 0], [0, 0]]]))
    with pytest.raises(ValueError):
        Nil2Presentation(3, 2, 2, np.array([[[0, 1], [2, 0]], [[0, 0], [0, 0]]]), P=[[0, 1]])
    with pytest.raises(TableTooLarge):
        baer_group(free_nil2_expp(4, 3), cap=3**8)


def test_presentation_text_roundtrip():
    pres = symplectic(3)
    back = read_presentation(pres.to_text())
    assert back == pres
    assert read_presentation("p: 3\ndimV: 2\ndimW: 1\n0 1\n2 0\n").P.shape == (1, 1)


def test_presentation_of_examples():
    pres = presentation_of(abelian([3, 3]), 3)
    assert (pres.dV, pres.dW) == (2, 0) and not pres.beta.any()
    pres = presentation_of(heisenberg(3), 3)
    assert (pres.dV, pres.dW) == (2, 1)
    assert is_isomorphic(baer_group(pres), heisenberg(3))
    with pytest.raises(WrongVariety):
        presentation_of(symmetric(3), 3)


def test_free_groups():
    assert is_isomorphic(baer_group(free_nil2_expp(1, 3)), cyclic(3))
    assert is_isomorphic(baer_group(free_nil2_expp(2, 3)), heisenberg(3))
    F3 = validated(baer_group(free_nil2_expp(3, 3)))
    assert F3.order == 3**6 and F3.exponent == 3 and F3.nilpotency_class == 2
    for k in range(1, 4):
        assert free_nil2_expp(k, 5).order == 5 ** (k + k * (k - 1) // 2)


def test_amalgamation_base_examples():
    assert is_amalgamation_base(heisenberg(3))
    assert is_amalgamation_base(heisenberg(5))
    assert not is_amalgamation_base(cyclic(3))
    assert not is_amalgamation_base(direct_sum(heisenberg(3), cyclic(3)))


def test_embed_into_base_examples():
    H = heisenberg(3)
    G1, e = embed_into_amalg_base(H)
    assert G1 is H or is_isomorphic(G1, H)
    assert e.is_injective and G1.order == 27
    G1, e = embed_into_amalg_base(cyclic(3))
    assert G1.order == 27 and is_amalgamation_base(G1) and e.is_injective
    assert e.image() <= G1.center
    G0 = direct_sum(H, cyclic(3))
    G1, e = embed_into_amalg_base(G0)
    assert is_amalgamation_base(validated(G1)) and e.is_injective and G1.order <= 3**5


def test_amalgam_examples():
    C3 = cyclic(3)
    am = nil2_amalgam(Morphism(trivial(), C3, [0]), Morphism(trivial(), C3, [0]), p=3)
    assert is_isomorphic(am.group, abelian([3, 3]))
    H = heisenberg(3)
    Z = sorted(H.center)
    gen = next(z for z in Z if z != H.unit)
    e = Morphism(C3, H, [H.power(gen, k) for k in range(3)])
    am = nil2_amalgam(e, e, p=3, P0=frozenset(range(3)))
    G = validated(am.group)
    assert G.order == 3**5 and G.exponent == 3 and G.nilpotency_class == 2
    assert am.j1.is_injective and am.j2.is_injective
    assert am.j1.compose(e) == am.j2.compose(e)


def test_incompatible_predicates():
    H = heisenberg(3)
    C3 = cyclic(3)
    gen = next(z for z in H.center if z != H.unit)
    e1 = Morphism(C3, H, [H.power(gen, k) for k in range(3)])
    A = abelian([3, 3])
    e2 = Morphism(C3, A, [0, 1, 2])
    # the derived subgroup of an abelian group meets C3 trivially, that of H does not
    with pytest.raises(IncompatiblePredicates):
        nil2_amalgam(e1, e2, p=3)
    am = nil2_amalgam(e1, e2, p=3, P2=e2.image())
    assert predicate_restrictions_hold(am, H.derived, e2.image())


nil2_groups = [cyclic(3), abelian([3, 3]), heisenberg(3), direct_sum(heisenberg(3), cyclic(3))]


@settings(max_examples=25)
@given(st.sampled_from(nil2_groups[:3]), st.sampled_from(nil2_groups), st.sampled_from(nil2_groups), st.integers(0, 10**6))
def test_amalgams_are_valid_and_commute(G0, G1, G2, seed):
    e1s, e2s = find_embeddings(G0, G1), find_embeddings(G0, G2)
    if not e1s or not e2s:
        return
    e1, e2 = e1s[seed % len(e1s)], e2s[(seed // 11) % len(e2s)]
    P1 = G1.center
    P2 = G2.center
    if e1.preimage(P1) != e2.preimage(P2):
        with pytest.raises(IncompatiblePredicates):
            nil2_amalgam(e1, e2, p=3, P1=P1, P2=P2)
        return
    am = nil2_amalgam(e1, e2, p=3, P1=P1, P2=P2)
    G = am.group
    assert G.exponent in (1, 3) and G.nilpotency_class <= 2
    assert am.j1.is_injective and am.j2.is_injective
    assert am.j1.compose(e1) == am.j2.compose(e2)
    assert predicate_restrictions_hold(am, P1, P2)


@settings(max_examples=12)
@given(st.integers(0, 2), st.lists(st.integers(0, 2), min_size=3, max_size=3))
def test_baer_roundtrip_for_random_forms(dW, entries):
    p = 3
    beta = np.zeros((dW, 3, 3), dtype=int)
    for w in range(dW):
        for (i, j), x in zip(itertools.combinations(range(3), 2), entries):
            beta[w, i, j] = (x + w) % p
            beta[w, j, i] = (-(x + w)) % p
    G = validated(baer_group(Nil2Presentation(p, 3, dW, beta)))
    assert G.exponent in (1, 3) and (G.nilpotency_class or 0) <= 2
    assert is_isomorphic(baer_group(presentation_of(G, p)), G)
