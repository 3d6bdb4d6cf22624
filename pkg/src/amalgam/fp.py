"""Small dense linear algebra over the prime field F_p.

Vectors are rows of integer numpy arrays with entries in ``range(p)``.
"""

import numpy as np


def rref(m, p):
    """Reduced row echelon form of ``m`` over F_p; returns ``(R, pivot_columns)``."""
    r = np.array(m, dtype=np.int64) % p
    if r.ndim != 2:
        raise ValueError("rref expects a 2-d array")
    rows, cols = r.shape
    pivots = []
    lead = 0
    for c in range(cols):
        if lead >= rows:
            break
        nz = np.nonzero(r[lead:, c])[0]
        if nz.size == 0:
            continue
        k = lead + nz[0]
        if k != lead:
            r[[lead, k]] = r[[k, lead]]
        r[lead] = (r[lead] * pow(int(r[lead, c]), -1, p)) % p
        for i in range(rows):
            if i != lead and r[i, c]:
                r[i] = (r[i] - r[i, c] * r[lead]) % p
        pivots.append(c)
        lead += 1
    return r, pivots


def rank(m, p):
    m = np.asarray(m)
    if m.size == 0:
        return 0
    return len(rref(m, p)[1])


def row_basis(m, p, dim):
    """A basis (rows, in echelon form) for the row span of ``m``."""
    if dim == 0:
        return np.zeros((0, 0), dtype=np.int64)
    m = np.asarray(m, dtype=np.int64).reshape(-1, dim)
    if m.shape[0] == 0:
        return np.zeros((0, dim), dtype=np.int64)
    r, piv = rref(m, p)
    return r[: len(piv)]


def extend_basis(sub, p, dim):
    """Standard basis vectors completing the rows of ``sub`` to a basis of F_p^dim.

    Only the added vectors are returned, chosen greedily in coordinate order.
    """
    cur = row_basis(sub, p, dim)
    added = []
    for i in range(dim):
        e = np.zeros(dim, dtype=np.int64)
        e[i] = 1
        trial = np.vstack([cur, e[None, :]]) if cur.size else e[None, :]
        if rank(trial, p) > cur.shape[0]:
            cur = row_basis(trial, p, dim)
            added.append(e)
    return np.array(added, dtype=np.int64).reshape(len(added), dim)


def solve_coords(basis, vectors, p):
    """Coordinates of each row of ``vectors`` in the (independent) rows of ``basis``.

    Raises ValueError if some vector is outside the span.
    """
    basis = np.asarray(basis, dtype=np.int64)
    vectors = np.asarray(vectors, dtype=np.int64)
    k, dim = basis.shape
    if vectors.ndim == 1:
        vectors = vectors[None, :]
    if k == 0:
        if np.any(vectors % p):
            raise ValueError("vector outside span")
        return np.zeros((vectors.shape[0], 0), dtype=np.int64)
    # Solve c @ basis = v  <=>  basis^T c^T = v^T
    aug = np.hstack([basis.T % p, vectors.T % p])
    r, piv = rref(aug, p)
    if any(c >= k for c in piv):
        raise ValueError("vector outside span")
    if len(piv) != k:
        raise ValueError("basis rows are dependent")
    sol = np.zeros((k, vectors.shape[0]), dtype=np.int64)
    for row, c in enumerate(piv):
        sol[c] = r[row, k:]
    return sol.T % p


def in_span(basis, v, p):
    try:
        solve_coords(basis, v, p)
    except ValueError:
        return False
    return True


def intersect(a, b, p, dim):
    """Basis of the intersection of two row spans."""
    a = row_basis(a, p, dim)
    b = row_basis(b, p, dim)
    if a.shape[0] == 0 or b.shape[0] == 0:
        return np.zeros((0, dim), dtype=np.int64)
    # x @ a = y @ b  -> kernel of [a; -b]^T
    stacked = np.vstack([a, (-b) % p])
    ker = left_kernel(stacked, p)
    return row_basis((ker[:, : a.shape[0]] @ a) % p, p, dim)


def left_kernel(m, p):
    """Basis of {x : x @ m = 0}."""
    m = np.asarray(m, dtype=np.int64) % p
    rows, cols = m.shape
    aug = np.hstack([m, np.eye(rows, dtype=np.int64)])
    r, piv = rref(aug, p)
    out = [r[i, cols:] for i in range(rows) if not np.any(r[i, :cols])]
    return np.array(out, dtype=np.int64).reshape(len(out), rows)
