import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from amalgam.completion import algebra_complete_within
from amalgam.diagrams import Diagram, default_labels
from amalgam.errors import NotAGroupPresentation, PreconditionFailed
from amalgam.library import cyclic, small_groups, symmetric, trivial
from amalgam.semiring import (
    UNIT_SYMBOL,
    Presentation,
    group_to_semigroup_presentation,
    parse_presentation,
    parse_poly,
    parse_word,
    rewrite_correctness_check,
    semigroup_diagram,
)


def a3():
    return parse_presentation("kind: group\ngens: a\nrel: a^3 = 1\n")


def test_rewrite_cyclic_relator():
    S = group_to_semigroup_presentation(a3())
    assert S.kind == "semigroup" and S.generators == ("a", "a'", UNIT_SYMBOL)
    rel = {(" ".join(s for s, _ in l), " ".join(s for s, _ in r)) for l, r in S.relations}
    assert rel == {
        ("a e1", "a"),
        ("e1 a", "a"),
        ("a' e1", "a'"),
        ("e1 a'", "a'"),
        ("e1 e1", "e1"),
        ("a a'", "e1"),
        ("a' a", "e1"),
        ("a a a", "e1"),
    }


def test_rewrite_free_and_commutator():
    S = group_to_semigroup_presentation(parse_presentation("kind: group\ngens: a\n"))
    assert len(S.generators) == 3 and len(S.relations) == 7
    P = parse_presentation("kind: group\ngens: a b\nrel: a*b*a^-1*b^-1 = 1\n")
    S = group_to_semigroup_presentation(P)
    assert S.relations[-1] == ((("a", 1), ("b", 1), ("a'", 1), ("b'", 1)), (("e1", 1),))
    with pytest.raises(NotAGroupPresentation):
        group_to_semigroup_presentation(S)


def test_unit_symbol_avoids_clashes():
    P = Presentation("group", ("e1", "a'"), ())
    S = group_to_semigroup_presentation(P)
    assert len(set(S.generators)) == 5


@given(st.integers(1, 4), st.lists(st.lists(st.tuples(st.integers(0, 3), st.sampled_from([1, -1])), max_size=5), max_size=4))
def test_rewrite_is_size_linear_and_positive(n, raw):
    gens = tuple(f"x{i}" for i in range(n))
    rels = tuple((tuple((gens[i % n], e) for i, e in w), ()) for w in raw)
    S = group_to_semigroup_presentation(Presentation("group", gens, rels))
    assert len(S.generators) == 2 * n + 1
    assert len(S.relations) == 6 * n + 1 + len(rels)
    assert all(e == 1 for l, r in S.relations for side in (l, r) for _, e in side)
    assert parse_presentation(S.to_text()) == S


def test_presentation_parsing():
    assert parse_word("a*b^-2") == (("a", 1), ("b", -1), ("b", -1))
    assert parse_word("1") == ()
    with pytest.raises(PreconditionFailed):
        parse_word("a^-1", allow_negative=False)
    assert parse_poly("a*a + a - 2*b") == ((1, ("a", "a")), (1, ("a",)), (-2, ("b",)))
    R = parse_presentation("kind: ring\ngens: a\nrel: a*a + a = 0\n")
    assert parse_presentation(R.to_text()) == R
    with pytest.raises(PreconditionFailed):
        parse_presentation("kind: group\ngens: a\nrel: b = 1\n")
    with pytest.raises(PreconditionFailed):
        parse_presentation("kind: semigroup\ngens: a\nrel: a^-1 = a\n")
    with pytest.raises(PreconditionFailed):
        parse_presentation("kind: monoid\ngens: a\n")


def test_semigroup_examples():
    comps = algebra_complete_within(Diagram("semigroup", [1], [("mul", (1, 1), 1)]), "semigroup", 1)
    assert len(comps) == 1 and comps[0].order == 1
    G = cyclic(3)
    S = group_to_semigroup_presentation(a3())
    gen = 1
    D = semigroup_diagram(G, S, {"a": gen, "a'": G.inv(gen), "e1": G.unit}, default_labels(G))
    comps = algebra_complete_within(D, "semigroup", 3)
    assert len(comps) == 1
    T = comps[0].algebra.table
    assert sorted(np.unique(T).tolist()) == [0, 1, 2] and np.array_equal(T, T.T)


def test_ring_example():
    D = Diagram("ring", [0, 1], [("add", (1, 1), 0), ("mul", (1, 1), 1)])
    comps = algebra_complete_within(D, "ring", 2)
    assert len(comps) == 1
    R = comps[0].algebra
    n = R.order
    for a, b, c in itertools.product(range(n), repeat=3):
        assert R.mul[a, R.add[b, c]] == R.add[R.mul[a, b], R.mul[a, c]]
        assert R.mul[R.add[a, b], c] == R.add[R.mul[a, c], R.mul[b, c]]


def test_rewrite_correctness_examples():
    assert rewrite_correctness_check(trivial())
    assert rewrite_correctness_check(cyclic(3))
    assert rewrite_correctness_check(symmetric(3), 6)
