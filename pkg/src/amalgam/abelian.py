"""Finitely generated abelian groups: Smith normal form, pushout amalgams and
finite separating quotients of abelian diagrams."""

from __future__ import annotations

import math

import itertools
from dataclasses import dataclass

import numpy as np

from .diagrams import Diagram, diagram_of
from .errors import NoFiniteWitness, NotAbelian, NotInjective, PreconditionFailed
from .groups import FiniteGroup, Morphism, direct_sum, quotient, subgroup_generated, sum_injections
from .library import abelian, abelian_groups_of_order, abelian_invariant_lists

# ---------------------------------------------------------------------------
# exact integer matrices (lists of lists of Python ints)


def _identity(n):
    return [[int(i == j) for j in range(n)] for i in range(n)]


def matmul(a, b):
    if not a:
        return []
    inner = len(b)
    cols = len(b[0]) if b else 0
    return [[sum(a[i][k] * b[k][j] for k in range(inner)) for j in range(cols)] for i in range(len(a))]


def det(m) -> int:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    n = len(m)
    if n == 0:
        return 1
    a = [list(r) for r in m]
    sign, prev = 1, 1
    for k in range(n - 1):
        if a[k][k] == 0:
            swap = next((i for i in range(k + 1, n) if a[i][k]), None)
            if swap is None:
                return 0
            a[k], a[swap] = a[swap], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) // prev
        prev = a[k][k]
    return sign * a[n - 1][n - 1]


def parse_matrix(text: str):
    rows = [[int(x) for x in line.split()] for line in text.splitlines() if line.split()]
    if rows and any(len(r) != len(rows[0]) for r in rows):
        raise ValueError("ragged matrix")
    return rows


def smith_normal_form(M):
    """Return ``(U, S, V)`` with ``U M V = S``, U and V unimodular, S diagonal with d1 | d2 | ...

    Pivot rule: smallest nonzero absolute value in the active block, ties broken
    by position, so the output is deterministic.
    """
    S = [[int(x) for x in row] for row in M]
    r = len(S)
    c = len(S[0]) if r else 0
    U, V = _identity(r), _identity(c)

    def swap_rows(i, j):
        S[i], S[j] = S[j], S[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for row in S:
            row[i], row[j] = row[j], row[i]
        for row in V:
            row[i], row[j] = row[j], row[i]

    def add_row(dst, src, q):  # row dst += q * row src
        S[dst] = [x + q * y for x, y in zip(S[dst], S[src])]
        U[dst] = [x + q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):
        for row in S:
            row[dst] += q * row[src]
        for row in V:
            row[dst] += q * row[src]

    for t in range(min(r, c)):
        while True:
            entries = [(abs(S[i][j]), i, j) for i in range(t, r) for j in range(t, c) if S[i][j]]
            if not entries:
                break
            _, i, j = min(entries)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
            piv = S[t][t]
            dirty = False
            for i in range(t + 1, r):
                if S[i][t]:
                    add_row(i, t, -(S[i][t] // piv))
                    dirty |= S[i][t] != 0
            for j in range(t + 1, c):
                if S[t][j]:
                    add_col(j, t, -(S[t][j] // piv))
                    dirty |= S[t][j] != 0
            if dirty:
                continue
            bad = next(((i, j) for i in range(t + 1, r) for j in range(t + 1, c) if S[i][j] % piv), None)
            if bad is None:
                break
            add_row(t, bad[0], 1)
        if t < r and t < c and S[t][t] < 0:
            S[t] = [-x for x in S[t]]
            U[t] = [-x for x in U[t]]
    return U, S, V


def snf_diagonal(M) -> list[int]:
    _, S, _ = smith_normal_form(M)
    return [S[i][i] for i in range(min(len(S), len(S[0]) if S else 0))]


# ---------------------------------------------------------------------------
# abelian groups


@dataclass(frozen=True)
class AbelianGroup:
    invariant_factors: tuple[int, ...]
    free_rank: int = 0

    def __post_init__(self):
        f = self.invariant_factors
        if any(d < 2 for d in f) or any(f[i + 1] % f[i] for i in range(len(f) - 1)):
            raise ValueError(f"not an invariant factor chain: {f}")

    @property
    def is_finite(self) -> bool:
        return self.free_rank == 0

    @property
    def order(self) -> int | None:
        return int(np.prod(self.invariant_factors, dtype=object)) if self.is_finite else None

    def to_group(self) -> FiniteGroup:
        if not self.is_finite:
            raise ValueError("infinite abelian group has no finite table")
        return abelian(list(self.invariant_factors))

    def __str__(self):
        parts = [f"Z/{d}" for d in self.invariant_factors]
        if self.free_rank:
            parts.append("Z" if self.free_rank == 1 else f"Z^{self.free_rank}")
        return " + ".join(parts) if parts else "0"


def abelian_from_relations(gen_count: int, relations) -> AbelianGroup:
    """``Z^gen_count`` modulo the row span of ``relations``."""
    rows = [list(r) for r in relations]
    if any(len(r) != gen_count for r in rows):
        raise ValueError("each relation needs one entry per generator")
    if not rows or gen_count == 0:
        return AbelianGroup((), gen_count)
    diag = snf_diagonal(rows)
    nonzero = [d for d in diag if d]
    return AbelianGroup(tuple(d for d in nonzero if d > 1), gen_count - len(nonzero))


def invariants_of(G: FiniteGroup) -> AbelianGroup:
    """Invariant factors of a finite abelian group, matched by power-map kernel sizes."""
    if not G.is_abelian():
        raise NotAbelian("group is not abelian")
    n = G.order
    divisors = [d for d in range(1, n + 1) if n % d == 0]

    # count of x with order dividing d, for each divisor d
    def kernels(H):
        o = H.element_orders
        return tuple(int(np.sum(d % o == 0)) for d in divisors)

    # in Z/f1 + ... + Z/fk exactly prod gcd(d, fi) elements have order dividing d
    target = kernels(G)
    for f in abelian_invariant_lists(n) or [()]:
        if tuple(int(np.prod([math.gcd(d, x) for x in f], dtype=object)) for d in divisors) == target:
            return AbelianGroup(tuple(f))
    raise AssertionError("no invariant list matches")  # unreachable for abelian G


# ---------------------------------------------------------------------------
# amalgamation


@dataclass(frozen=True)
class AbelianAmalgam:
    group: FiniteGroup
    j1: Morphism
    j2: Morphism
    projection: Morphism  # A1 + A2 -> A3
    inj1: Morphism
    inj2: Morphism


def abelian_amalgam(i1: Morphism, i2: Morphism) -> AbelianAmalgam:
    """Pushout ``(A1 + A2) / {(i1 x, -i2 x)}`` of two embeddings of ``A0``."""
    if i1.source != i2.source:
        raise PreconditionFailed("the two embeddings must share their source")
    for i in (i1, i2):
        if not i.is_injective:
            raise NotInjective("amalgamation needs embeddings")
        for G in (i.source, i.target):
            if not G.is_abelian():
                raise NotAbelian("abelian amalgam needs abelian groups")
    A1, A2 = i1.target, i2.target
    S = direct_sum(A1, A2)
    e1, e2 = sum_injections(A1, A2, S)
    N = {int(S.table[e1(i1(x)), e2(int(A2.inverse[i2(x)]))]) for x in range(i1.source.order)}
    A3, pi = quotient(S, N)
    j1, j2 = pi.compose(e1), pi.compose(e2)
    if not (j1.is_injective and j2.is_injective):
        raise AssertionError("pushout legs must be injective")  # guaranteed for abelian groups
    if j1.compose(i1) != j2.compose(i2):
        raise AssertionError("pushout square does not commute")
    return AbelianAmalgam(A3, j1, j2, pi, e1, e2)


def pushout_mediator(am: AbelianAmalgam, b1: Morphism, b2: Morphism) -> Morphism | None:
    """The unique ``m: A3 -> B`` with ``m j1 = b1`` and ``m j2 = b2``, or None if none exists."""
    A1, A2 = am.inj1.source, am.inj2.source
    B = b1.target
    m = -np.ones(am.group.order, dtype=np.int64)
    for x in range(A1.order):
        for y in range(A2.order):
            s = am.projection(direct_index(A2, x, y))
            v = int(B.table[b1(x), b2(y)])
            if m[s] >= 0 and m[s] != v:
                return None
            m[s] = v
    try:
        return Morphism(am.group, B, m)
    except Exception:
        return None


def direct_index(H: FiniteGroup, g: int, h: int) -> int:
    """Index of ``(g, h)`` in ``direct_sum(G, H)``."""
    return g * H.order + h


def legs_generate(am: AbelianAmalgam) -> bool:
    gens = sorted(am.j1.image() | am.j2.image())
    return len(subgroup_generated(am.group, gens)) == am.group.order


# ---------------------------------------------------------------------------
# separating finite quotients of diagrams


def _diagram_relations(D: Diagram):
    """Integer relation rows over the non-unit labels, one per cell."""
    gens = [x for x in D.domain if x != D.unit]
    pos = {x: i for i, x in enumerate(gens)}
    rows, cells = [], []
    for op, args, v in D.cells:
        row = [0] * len(gens)
        for lab, coeff in ([(args[0], 1), (args[1], 1), (v, -1)] if op == "mul" else [(args[0], 1), (v, 1)]):
            if lab in pos:
                row[pos[lab]] += coeff
        if any(row):
            rows.append(row)
            cells.append((op, args, v))
    return gens, rows, cells


def _lattice_membership(rows, vec):
    """Integer combination of ``rows`` equal to ``vec``, or None."""
    if not rows:
        return None if any(vec) else []
    U, S, V = smith_normal_form(rows)
    w = matmul([list(vec)], V)[0]
    coeffs = []
    for i in range(len(w)):
        d = S[i][i] if i < len(S) else 0
        if d == 0:
            if w[i]:
                return None
            coeffs.append(0)
        else:
            if w[i] % d:
                return None
            coeffs.append(w[i] // d)
    coeffs += [0] * (len(S) - len(coeffs))
    return matmul([coeffs[: len(S)]], U)[0]


def forced_equalities(D: Diagram):
    """Pairs of distinct labels that every abelian completion would identify, with derivations."""
    gens, rows, cells = _diagram_relations(D)
    n = len(gens)
    out = []
    labels = [D.unit] + gens
    for a, b in itertools.combinations(labels, 2):
        vec = [0] * n
        if a in gens:
            vec[gens.index(a)] += 1
        if b in gens:
            vec[gens.index(b)] -= 1
        combo = _lattice_membership(rows, vec)
        if combo is not None:
            out.append(((a, b), [(c, k) for c, k in zip(cells, combo) if k]))
    return out


def _witness_order_bound(D: Diagram) -> int:
    """Order of an explicit finite abelian quotient separating all labels."""
    gens, rows, _ = _diagram_relations(D)
    n = len(gens)
    if n == 0:
        return 1
    if not rows:
        rows = [[0] * n]
    U, S, V = smith_normal_form(rows)
    diag = [S[i][i] if i < len(S) else 0 for i in range(n)]
    # coordinates of each label in the SNF basis: e_x V (mod diag)
    coords = [matmul([[int(k == i) for k in range(n)]], V)[0] for i in range(n)]
    vecs = [[0] * n] + coords
    span = 0
    for a, b in itertools.combinations(vecs, 2):
        for k in range(n):
            if diag[k] == 0:
                span = max(span, abs(a[k] - b[k]))
    big = 2 * span + 1
    order = 1
    for d in diag:
        order *= d if d else big
    return order


def abelian_t_isolating_extension(D: Diagram, max_order: int | None = None) -> Diagram:
    """Full table of the smallest abelian group generated by the labels of D that satisfies D.

    Groups are tried in increasing order, then by invariant factors; the labels
    of D keep their names and new elements get fresh labels.
    """
    if D.kind != "group":
        raise PreconditionFailed("abelian extensions need a group diagram")
    forced = forced_equalities(D)
    if forced:
        (a, b), derivation = forced[0]
        raise NoFiniteWitness(f"cells force labels {a} and {b} to coincide", derivation)
    from .completion import group_labelings

    limit = _witness_order_bound(D)
    if max_order is not None:
        limit = min(limit, max_order)
    dom = list(D.domain)
    for n in range(max(1, len(dom)), limit + 1):
        for F in abelian_groups_of_order(n):
            for pts in sorted(group_labelings(D, F)):
                if len(subgroup_generated(F, pts)) != n:
                    continue
                labels = [None] * n
                for lab, x in zip(dom, pts):
                    labels[x] = lab
                nxt = max(dom) + 1
                for i in range(n):
                    if labels[i] is None:
                        labels[i] = nxt
                        nxt += 1
                return diagram_of(F, pts, labels=labels)
    raise NoFiniteWitness(f"no separating abelian quotient of order <= {limit}", [])
