"""Bounded completion search: total algebras of small order satisfying a diagram.

Group completions are drawn from a candidate list of groups (the built-in
library, all abelian groups, or a caller-supplied pool) and located by
propagating the diagram's cells through each candidate's table. Semigroup and
ring completions are found by direct table search. Results are reduced up to
isomorphism fixing the diagram's labels.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from .algebras import FiniteRing, FiniteSemigroup
from .diagrams import Diagram, EnumeratedApprox, check_partial_consistency
from .errors import BoundTooSmall, CatalogCoverage, KindMismatch, PreconditionFailed
from .groups import FiniteGroup, _extend_map, find_embeddings, generating_set, subgroup_generated
from .library import LIBRARY_MAX_ORDER, abelian, abelian_groups_of_order, abelian_invariant_lists, small_groups
from .varieties import GROUPS, VarietySpec


@dataclass(frozen=True)
class Completion:
    """A total algebra with the position of each diagram label."""

    algebra: object
    assignment: tuple  # ((label, element index), ...) in domain order

    @property
    def mapping(self) -> dict:
        return dict(self.assignment)

    @property
    def order(self) -> int:
        return self.algebra.order

    def approx(self) -> EnumeratedApprox:
        """Label the remaining elements with fresh labels above the diagram's."""
        m = self.mapping
        labels = [None] * self.algebra.order
        for lab, idx in m.items():
            labels[idx] = lab
        nxt = max(m, default=0) + 1
        for i in range(len(labels)):
            if labels[i] is None:
                labels[i] = nxt
                nxt += 1
        return EnumeratedApprox(self.algebra, labels)


# ---------------------------------------------------------------------------
# candidate groups


def candidate_groups(V: VarietySpec, order_bound: int, pool=None) -> list[FiniteGroup]:
    """Groups of order <= order_bound satisfying V that the search will try."""
    if pool is not None:
        groups = [G for G in _pool_groups(pool) if G.order <= order_bound]
    elif V.abelian:
        groups = [G for n in range(1, order_bound + 1) for G in abelian_groups_of_order(n)]
    elif order_bound <= LIBRARY_MAX_ORDER:
        groups = list(small_groups(order_bound))
    else:
        raise CatalogCoverage(
            f"no exhaustive group list above order {LIBRARY_MAX_ORDER} for {V.name}; pass a pool"
        )
    return [G for G in groups if V.holds_in(G)]


def _pool_groups(pool):
    return list(getattr(pool, "groups", pool))


# ---------------------------------------------------------------------------
# groups


def full_table_group(D: Diagram):
    """The group whose full table D is, with the label of each element, or None."""
    if D.kind != "group" or not D.is_full() or not check_partial_consistency(D).ok:
        return None
    dom = list(D.domain)
    pos = {x: i for i, x in enumerate(dom)}
    table = [[pos[D.value("mul", a, b)] for b in dom] for a in dom]
    return FiniteGroup(table, pos[D.unit]), dom


def group_labelings(D: Diagram, G: FiniteGroup, limit: int | None = None):
    """All injective placements of D's labels into G honouring every cell."""
    dom = list(D.domain)
    if len(dom) > G.order:
        return []
    full = full_table_group(D) if len(dom) > 2 else None
    if full is not None:
        # a full table places exactly as its embeddings do
        H, _ = full
        return [tuple(int(x) for x in m.map) for m in find_embeddings(H, G, limit)]
    T, inv = G.table, G.inverse
    muls = [(args[0], args[1], v) for op, args, v in D.cells if op == "mul"]
    invs = [(args[0], v) for op, args, v in D.cells if op == "inv"]
    by_label: dict[int, list] = {x: [] for x in dom}
    for cell in muls:
        for x in set(cell):
            by_label[x].append(("m", cell))
    for cell in invs:
        for x in set(cell):
            by_label[x].append(("i", cell))

    def put(asg, used, lab, val, todo):
        cur = asg.get(lab)
        if cur is not None:
            return cur == val
        if val in used:
            return False
        asg[lab] = val
        used.add(val)
        todo.append(lab)
        return True

    def propagate(asg, used, todo):
        while todo:
            lab = todo.pop()
            for kind, cell in by_label[lab]:
                if kind == "m":
                    a, b, c = cell
                    va, vb, vc = asg.get(a), asg.get(b), asg.get(c)
                    if va is not None and vb is not None:
                        ok = put(asg, used, c, int(T[va, vb]), todo)
                    elif va is not None and vc is not None:
                        ok = put(asg, used, b, int(T[inv[va], vc]), todo)
                    elif vb is not None and vc is not None:
                        ok = put(asg, used, a, int(T[vc, inv[vb]]), todo)
                    else:
                        ok = True
                else:
                    a, b = cell
                    va, vb = asg.get(a), asg.get(b)
                    if va is not None:
                        ok = put(asg, used, b, int(inv[va]), todo)
                    elif vb is not None:
                        ok = put(asg, used, a, int(inv[vb]), todo)
                    else:
                        ok = True
                if not ok:
                    return False
        return True

    out = []
    asg0, used0 = {}, set()
    if not put(asg0, used0, D.unit, G.unit, todo := []) or not propagate(asg0, used0, todo):
        return []

    def rec(asg, used):
        if limit is not None and len(out) >= limit:
            return
        free = next((x for x in dom if x not in asg), None)
        if free is None:
            out.append(tuple(asg[x] for x in dom))
            return
        for g in range(G.order):
            if g in used:
                continue
            a2, u2 = dict(asg), set(used)
            todo = []
            if put(a2, u2, free, g, todo) and propagate(a2, u2, todo):
                rec(a2, u2)

    rec(asg0, used0)
    return out


def _labeling_key(G: FiniteGroup, pts) -> tuple:
    orders = G.element_orders
    centre = G.center
    derived = G.derived
    head = tuple((int(orders[x]), x in centre, x in derived) for x in pts)
    prods = tuple(int(orders[G.table[x, y]]) for x in pts for y in pts)
    return head + prods


def automorphism_moving(G: FiniteGroup, src, dst) -> dict | None:
    """An automorphism of G sending src[i] to dst[i], or None."""
    gens = list(dict.fromkeys(src))
    if len(gens) != len(set(src)):
        return None
    images = [dst[src.index(g)] for g in gens]
    if _extend_map(G, G, gens, images) is None:
        return None
    H = subgroup_generated(G, gens)
    extra = []
    for x in sorted(range(G.order), key=lambda x: (-int(G.element_orders[x]), x)):
        if len(H) == G.order:
            break
        if x not in H:
            extra.append(x)
            H = subgroup_generated(G, gens + extra)
    orders = G.element_orders
    cands = [[y for y in range(G.order) if orders[y] == orders[x]] for x in extra]

    def rec(level, imgs):
        m = _extend_map(G, G, gens + extra[:level], images + imgs)
        if m is None:
            return None
        if level == len(extra):
            return m
        for y in cands[level]:
            r = rec(level + 1, imgs + [y])
            if r is not None:
                return r
        return None

    return rec(0, [])


def random_automorphisms(G: FiniteGroup, count: int, seed: int = 0) -> list[np.ndarray]:
    """Seeded sample of automorphisms of G, as permutation arrays."""
    rng = random.Random(seed)
    gens = generating_set(G)
    orders = G.element_orders
    cands = [[y for y in range(G.order) if orders[y] == orders[x]] for x in gens]
    out = []

    def rec(level, imgs):
        if _extend_map(G, G, gens[:level], imgs) is None:
            return None
        if level == len(gens):
            return imgs
        pool = cands[level][:]
        rng.shuffle(pool)
        for y in pool:
            r = rec(level + 1, imgs + [y])
            if r is not None:
                return r
        return None

    for _ in range(count):
        imgs = rec(0, [])
        m = _extend_map(G, G, gens, imgs)
        out.append(np.array([m[x] for x in range(G.order)], dtype=np.int64))
    return out


def _orbit_minima(labelings, autos) -> list[tuple]:
    """Least member of each orbit of the sampled automorphisms."""
    todo = set(labelings)
    reps = []
    for pts in sorted(labelings):
        if pts not in todo:
            continue
        todo.discard(pts)
        reps.append(pts)
        stack = [pts]
        while stack:
            cur = np.array(stack.pop(), dtype=np.int64)
            for a in autos:
                nxt = tuple(int(x) for x in a[cur])
                if nxt in todo:
                    todo.discard(nxt)
                    stack.append(nxt)
    return reps


def _group_completions(D: Diagram, V: VarietySpec, order_bound: int, pool) -> list[Completion]:
    out = []
    dom = D.domain
    for G in candidate_groups(V, order_bound, pool):
        labelings = group_labelings(D, G)
        if len(labelings) > 8:
            # sampled automorphisms merge most orbits; exact checks below finish the job
            labelings = _orbit_minima(labelings, random_automorphisms(G, 6))
        labelings = sorted(labelings)
        reps: dict[tuple, list] = {}
        for pts in labelings:
            key = _labeling_key(G, pts)
            bucket = reps.setdefault(key, [])
            if any(automorphism_moving(G, list(r), list(pts)) is not None for r in bucket):
                continue
            bucket.append(pts)
        classes = sorted(p for b in reps.values() for p in b)
        out.extend(Completion(G, tuple(zip(dom, pts))) for pts in classes)
    return out


# ---------------------------------------------------------------------------
# semigroups


def _semigroup_tables(fixed: np.ndarray, m: int):
    """Complete a partial m x m table (-1 = undefined) to associative tables."""
    t = fixed.copy()
    free = [tuple(c) for c in np.argwhere(t < 0)]

    def assoc_ok(x, y):
        # every triple touching the new cell (x, y)
        v = t[x, y]
        for z in range(m):
            # (x y) z = x (y z)
            l, yz = t[v, z], t[y, z]
            if l >= 0 and yz >= 0 and t[x, yz] >= 0 and t[x, yz] != l:
                return False
            # (w x) y = w (x y)
            wx, r = t[z, x], t[z, v]
            if wx >= 0 and r >= 0 and t[wx, y] >= 0 and t[wx, y] != r:
                return False
        # triples in which (x, y) is the outer product
        for a in range(m):
            for b in range(m):
                ab = t[a, b]
                if ab == x and t[b, y] >= 0 and t[a, t[b, y]] >= 0 and t[a, t[b, y]] != v:
                    return False
                if ab == y and t[x, a] >= 0 and t[t[x, a], b] >= 0 and t[t[x, a], b] != v:
                    return False
        return True

    def rec(i):
        if i == len(free):
            yield t.copy()
            return
        x, y = free[i]
        for v in range(m):
            t[x, y] = v
            if assoc_ok(x, y):
                yield from rec(i + 1)
        t[x, y] = -1

    if _partial_assoc(t):
        yield from rec(0)


def _partial_assoc(t) -> bool:
    m = t.shape[0]
    for x, y, z in itertools.product(range(m), repeat=3):
        xy, yz = t[x, y], t[y, z]
        if xy >= 0 and yz >= 0 and t[xy, z] >= 0 and t[x, yz] >= 0 and t[xy, z] != t[x, yz]:
            return False
    return True


def _canonical_tables(tables, k: int):
    """Least relabelling of the extra elements ``k..m-1`` (domain positions fixed)."""
    m = tables[0].shape[0]
    best = None
    for perm in itertools.permutations(range(k, m)):
        p = np.array(list(range(k)) + list(perm), dtype=np.int64)
        inv = np.empty_like(p)
        inv[p] = np.arange(m)
        key = tuple(p[t[inv[:, None], inv[None, :]]].tobytes() for t in tables)
        if best is None or key < best[0]:
            best = (key, p)
    return best


def _semigroup_completions(D: Diagram, order_bound: int) -> list[Completion]:
    dom = list(D.domain)
    k = len(dom)
    pos = {x: i for i, x in enumerate(dom)}
    out = []
    for m in range(max(k, 1), order_bound + 1):
        fixed = -np.ones((m, m), dtype=np.int64)
        for _, (a, b), c in D.cells:
            fixed[pos[a], pos[b]] = pos[c]
        seen = {}
        for t in _semigroup_tables(fixed, m):
            key, p = _canonical_tables([t], k)
            if key not in seen:
                inv = np.empty_like(p)
                inv[p] = np.arange(m)
                seen[key] = p[t[inv[:, None], inv[None, :]]]
        for key in sorted(seen):
            S = FiniteSemigroup(seen[key])
            out.append(Completion(S, tuple((x, i) for i, x in enumerate(dom))))
    return out


# ---------------------------------------------------------------------------
# rings


def _additive_diagram(D: Diagram) -> Diagram:
    cells = [("mul" if op == "add" else "inv", args, v) for op, args, v in D.cells if op in ("add", "neg")]
    return Diagram("group", D.domain, cells, {"unit": D.zero})


def _ring_products(factors, A: FiniteGroup):
    """Every bilinear multiplication on the abelian group with the given invariant factors."""
    k = len(factors)
    n = A.order
    coords = np.array(list(itertools.product(*[range(d) for d in factors])), dtype=np.int64).reshape(n, k)
    radix = np.array([int(np.prod(factors[i + 1 :])) for i in range(k)], dtype=np.int64)
    mods = np.array(factors, dtype=np.int64)
    # allowed images of e_i * e_j: elements killed by gcd(d_i, d_j)
    options = []
    for i in range(k):
        for j in range(k):
            g = int(np.gcd(factors[i], factors[j]))
            options.append([x for x in range(n) if np.all((coords[x] * g) % mods == 0)])
    for choice in itertools.product(*options):
        P = coords[list(choice)].reshape(k, k, k) if k else np.zeros((0, 0, 0), dtype=np.int64)
        # (x*y)_c = sum_ij x_i y_j P[i,j,c]
        prod = np.einsum("ai,bj,ijc->abc", coords, coords, P) % mods if k else np.zeros((n, n, 0), dtype=np.int64)
        yield (prod * radix).sum(axis=2)


def _ring_completions(D: Diagram, order_bound: int) -> list[Completion]:
    dom = list(D.domain)
    k = len(dom)
    AD = _additive_diagram(D)
    muls = [(args[0], args[1], v) for op, args, v in D.cells if op == "mul"]
    out = []
    for n in range(max(k, 1), order_bound + 1):
        seen = {}
        for factors in abelian_invariant_lists(n) or [()]:
            A = abelian(list(factors))
            for pts in group_labelings(AD, A):
                loc = dict(zip(dom, pts))
                for mul in _ring_products(list(factors), A):
                    if any(mul[loc[a], loc[b]] != loc[c] for a, b, c in muls):
                        continue
                    if not FiniteSemigroup(mul, validate=False).is_associative():
                        continue
                    order = list(pts) + [x for x in range(n) if x not in set(pts)]
                    p = np.empty(n, dtype=np.int64)
                    p[order] = np.arange(n)
                    inv = np.array(order)
                    add_t = p[A.table[inv[:, None], inv[None, :]]]
                    mul_t = p[mul[inv[:, None], inv[None, :]]]
                    key, q = _canonical_tables([add_t, mul_t], k)
                    if key not in seen:
                        qi = np.empty_like(q)
                        qi[q] = np.arange(n)
                        seen[key] = (q[add_t[qi[:, None], qi[None, :]]], q[mul_t[qi[:, None], qi[None, :]]])
        for key in sorted(seen):
            add_t, mul_t = seen[key]
            R = FiniteRing(add_t, mul_t, zero=dom.index(D.zero))
            out.append(Completion(R, tuple((x, i) for i, x in enumerate(dom))))
    return out


# ---------------------------------------------------------------------------
# entry point


def complete_within(D: Diagram, V: VarietySpec | None = None, order_bound: int = 1, pool=None) -> list[Completion]:
    """Completions of D of order <= order_bound, one per isomorphism class over D.

    An empty list only means that nothing was found at this bound.
    """
    if order_bound < len(D.domain):
        raise BoundTooSmall(f"bound {order_bound} is below the domain size {len(D.domain)}")
    report = check_partial_consistency(D)
    if not report.ok:
        raise PreconditionFailed(f"diagram is not locally consistent: {report.violation}")
    if D.kind == "group":
        return _group_completions(D, V or GROUPS, order_bound, pool)
    if D.kind == "semigroup":
        return _semigroup_completions(D, order_bound)
    return _ring_completions(D, order_bound)


def algebra_complete_within(D: Diagram, kind: str, order_bound: int) -> list[Completion]:
    if D.kind != kind:
        raise KindMismatch(f"diagram is a {D.kind} diagram, not {kind}")
    return complete_within(D, None, order_bound)
