import itertools

import numpy as np
from hypothesis import given, strategies as st

from amalgam.fp import extend_basis, in_span, intersect, left_kernel, rank, row_basis, rref, solve_coords


def span(rows, p, dim):
    """All vectors in the span, by enumerating coefficient tuples."""
    rows = [np.asarray(r) % p for r in rows]
    out = set()
    for coeffs in itertools.product(range(p), repeat=len(rows)):
        v = np.zeros(dim, dtype=np.int64)
        for c, r in zip(coeffs, rows):
            v = (v + c * r) % p
        out.add(tuple(int(x) for x in v))
    return out


matrices = st.integers(1, 3).flatmap(
    lambda r: st.integers(1, 3).flatmap(
        lambda c: st.tuples(
            st.sampled_from([3, 5]),
            st.lists(st.lists(st.integers(0, 4), min_size=c, max_size=c), min_size=r, max_size=r),
        )
    )
)


@given(matrices)
def test_rank_matches_span_size(data):
    p, m = data
    dim = len(m[0])
    assert p ** rank(m, p) == len(span(m, p, dim))


@given(matrices)
def test_rref_preserves_span(data):
    p, m = data
    dim = len(m[0])
    r, piv = rref(m, p)
    assert span(r, p, dim) == span(m, p, dim)
    for i, c in enumerate(piv):
        assert r[i, c] == 1 and np.count_nonzero(r[:, c]) == 1


@given(matrices)
def test_basis_extension_and_coordinates(data):
    p, m = data
    dim = len(m[0])
    b = row_basis(m, p, dim)
    added = extend_basis(b, p, dim)
    full = np.vstack([b.reshape(-1, dim), added])
    assert full.shape == (dim, dim) and rank(full, p) == dim
    if b.shape[0]:
        coords = solve_coords(b, np.asarray(m) % p, p)
        assert np.array_equal((coords @ b) % p, np.asarray(m) % p)
        assert all(in_span(b, row, p) for row in m)


@given(matrices, matrices)
def test_intersection_is_exact(a, b):
    (p, m1), (_, m2) = a, b
    dim = min(len(m1[0]), len(m2[0]))
    m1 = [row[:dim] for row in m1]
    m2 = [row[:dim] for row in m2]
    meet = intersect(m1, m2, p, dim)
    assert span(meet, p, dim) == span(m1, p, dim) & span(m2, p, dim)


@given(matrices)
def test_left_kernel(data):
    p, m = data
    k = left_kernel(m, p)
    rows = len(m)
    assert k.shape[0] == rows - rank(m, p)
    if k.shape[0]:
        assert not np.any((k @ np.asarray(m)) % p)
