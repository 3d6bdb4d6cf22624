"""Total finite groups given by multiplication tables.

Elements are the indices ``0..n-1``; a :class:`FiniteGroup` owns an immutable
numpy table and computes its structural invariants (center, lower and upper
central series, exponent, nilpotency class) on first access.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property, reduce
from typing import Iterable, Sequence

import numpy as np

from .errors import (
    NoInverse,
    NoUnit,
    NotAHomomorphism,
    NotAssociative,
    NotNormal,
    NotSubgroup,
)


def _as_table(table) -> np.ndarray:
    t = np.array(table, dtype=np.int64)
    if t.ndim != 2 or t.shape[0] != t.shape[1]:
        raise ValueError("multiplication table must be square")
    n = t.shape[0]
    if n == 0:
        raise ValueError("empty table")
    if t.min() < 0 or t.max() >= n:
        raise ValueError("table entry out of range")
    t.setflags(write=False)
    return t


def magma_generators(table: np.ndarray) -> list[int]:
    """Greedy generating set of the magma defined by ``table``."""
    n = table.shape[0]
    closed = np.zeros(n, dtype=bool)
    gens: list[int] = []
    for e in range(n):
        if closed[e]:
            continue
        gens.append(e)
        members = np.flatnonzero(closed).tolist() + [e]
        current = set(members)
        while True:
            idx = np.fromiter(current, dtype=np.int64)
            prod = set(np.unique(table[np.ix_(idx, idx)]).tolist())
            if prod <= current:
                break
            current |= prod
        closed[list(current)] = True
    return gens


class FiniteGroup:
    """A validated finite group on ``range(order)``."""

    kind = "group"

    def __init__(self, table, unit: int = 0, *, name: str | None = None, validate: bool = True):
        self.table = _as_table(table)
        self.order = self.table.shape[0]
        self.unit = int(unit)
        self.name = name
        if validate:
            self._validate()

    # -- axioms ---------------------------------------------------------
    def _validate(self) -> None:
        t, n, e = self.table, self.order, self.unit
        if not (0 <= e < n):
            raise NoUnit(f"unit index {e} out of range")
        ar = np.arange(n)
        if not (np.array_equal(t[e], ar) and np.array_equal(t[:, e], ar)):
            raise NoUnit(f"{e} is not a two-sided identity")
        for i in range(n):
            right = np.flatnonzero(t[i] == e)
            if right.size != 1 or t[right[0], i] != e:
                raise NoInverse(i)
        for s in magma_generators(t):
            left = t[t[:, s], :]
            right = t[:, t[s, :]]
            bad = np.argwhere(left != right)
            if bad.size:
                x, y = bad[0]
                raise NotAssociative(int(x), int(s), int(y))

    # -- basic arithmetic ----------------------------------------------
    def mul(self, a: int, b: int) -> int:
        return int(self.table[a, b])

    @cached_property
    def inverse(self) -> np.ndarray:
        inv = np.argmax(self.table == self.unit, axis=1)
        inv.setflags(write=False)
        return inv

    def inv(self, a: int) -> int:
        return int(self.inverse[a])

    def power(self, a: int, k: int) -> int:
        if k < 0:
            a, k = self.inv(a), -k
        r = self.unit
        for _ in range(k):
            r = int(self.table[r, a])
        return r

    @cached_property
    def element_orders(self) -> np.ndarray:
        n = self.order
        orders = np.zeros(n, dtype=np.int64)
        cur = np.arange(n)
        done = np.zeros(n, dtype=bool)
        for k in range(1, n + 1):
            hit = (cur == self.unit) & ~done
            orders[hit] = k
            done |= hit
            if done.all():
                break
            cur = self.table[cur, np.arange(n)]
        return orders

    @cached_property
    def order_profile(self) -> tuple[int, ...]:
        return tuple(sorted(self.element_orders.tolist()))

    @cached_property
    def commutators(self) -> np.ndarray:
        """``C[x, y] = x^-1 y^-1 x y``."""
        inv = self.inverse
        left = self.table[np.ix_(inv, inv)]
        return self.table[left, self.table]

    def commutator(self, a: int, b: int) -> int:
        return int(self.commutators[a, b])

    def is_abelian(self) -> bool:
        return bool(np.array_equal(self.table, self.table.T))

    # -- subgroups -------------------------------------------------------
    def subgroup_generated(self, gens: Iterable[int]) -> frozenset[int]:
        return subgroup_generated(self, gens)

    def is_subgroup(self, subset: Iterable[int]) -> bool:
        s = sorted(set(subset))
        if self.unit not in s:
            return False
        idx = np.array(s)
        return set(np.unique(self.table[np.ix_(idx, idx)]).tolist()) <= set(s)

    def is_normal(self, subset: Iterable[int]) -> bool:
        s = set(subset)
        if not self.is_subgroup(s):
            return False
        idx = np.array(sorted(s))
        conj = self.table[self.table[self.inverse[:, None], idx[None, :]], np.arange(self.order)[:, None]]
        return set(np.unique(conj).tolist()) <= s

    @cached_property
    def center(self) -> frozenset[int]:
        return frozenset(np.flatnonzero((self.table == self.table.T).all(axis=1)).tolist())

    @cached_property
    def lower_series(self) -> tuple[frozenset[int], ...]:
        series = [frozenset(range(self.order))]
        while True:
            prev = series[-1]
            comms = np.unique(self.commutators[np.array(sorted(prev)), :])
            nxt = self.subgroup_generated(comms.tolist())
            if nxt == prev:
                break
            series.append(nxt)
        return tuple(series)

    @cached_property
    def derived(self) -> frozenset[int]:
        s = self.lower_series
        return s[1] if len(s) > 1 else s[0]

    def gamma(self, i: int) -> frozenset[int]:
        """Gamma_i, 1-based; the series is constant after stabilisation."""
        s = self.lower_series
        if i < 1:
            raise ValueError("Gamma_i is indexed from 1")
        return s[min(i, len(s)) - 1]

    @cached_property
    def upper_series(self) -> tuple[frozenset[int], ...]:
        series = [frozenset([self.unit])]
        while True:
            prev = np.zeros(self.order, dtype=bool)
            prev[list(series[-1])] = True
            nxt = frozenset(np.flatnonzero(prev[self.commutators].all(axis=1)).tolist())
            if nxt == series[-1]:
                break
            series.append(nxt)
        return tuple(series)

    def zeta(self, i: int) -> frozenset[int]:
        s = self.upper_series
        return s[min(i, len(s) - 1)]

    @cached_property
    def exponent(self) -> int:
        return reduce(math.lcm, self.element_orders.tolist(), 1)

    @cached_property
    def nilpotency_class(self) -> int | None:
        s = self.lower_series
        if s[-1] != frozenset([self.unit]):
            return None
        return len(s) - 1

    @cached_property
    def fingerprint(self) -> tuple:
        """Isomorphism invariant used to bucket groups before exact tests."""
        return (
            self.order,
            self.order_profile,
            len(self.center),
            len(self.derived),
            tuple(len(x) for x in self.lower_series),
            tuple(len(x) for x in self.upper_series),
        )

    def __repr__(self) -> str:
        tag = f" {self.name}" if self.name else ""
        return f"<FiniteGroup{tag} order={self.order}>"

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, FiniteGroup)
            and self.unit == other.unit
            and np.array_equal(self.table, other.table)
        )

    def __hash__(self) -> int:
        return hash((self.unit, self.table.tobytes()))


def group_from_table(table, unit: int = 0) -> FiniteGroup:
    return FiniteGroup(table, unit)


def subgroup_generated(G: FiniteGroup, gens: Iterable[int]) -> frozenset[int]:
    g = np.array(sorted(set(int(x) for x in gens)), dtype=np.int64)
    seen = np.zeros(G.order, dtype=bool)
    seen[G.unit] = True
    frontier = np.array([G.unit], dtype=np.int64)
    while frontier.size and g.size:
        nxt = np.unique(G.table[frontier[:, None], g[None, :]])
        nxt = nxt[~seen[nxt]]
        seen[nxt] = True
        frontier = nxt
    return frozenset(np.flatnonzero(seen).tolist())


@dataclass(frozen=True)
class StructureReport:
    center: frozenset
    derived: frozenset
    lower_series: tuple
    upper_series: tuple
    exponent: int
    nilpotency_class: int | None


def structure_report(G: FiniteGroup) -> StructureReport:
    return StructureReport(
        center=G.center,
        derived=G.derived,
        lower_series=G.lower_series,
        upper_series=G.upper_series,
        exponent=G.exponent,
        nilpotency_class=G.nilpotency_class,
    )


class Morphism:
    """A group homomorphism, verified exhaustively on construction."""

    def __init__(self, source: FiniteGroup, target: FiniteGroup, mapping: Sequence[int]):
        m = np.array(mapping, dtype=np.int64)
        if m.shape != (source.order,):
            raise NotAHomomorphism("map length differs from source order")
        if m.min() < 0 or m.max() >= target.order:
            raise NotAHomomorphism("map value outside target")
        if m[source.unit] != target.unit:
            raise NotAHomomorphism("unit not preserved")
        lhs = m[source.table]
        rhs = target.table[m[:, None], m[None, :]]
        bad = np.argwhere(lhs != rhs)
        if bad.size:
            x, y = bad[0]
            raise NotAHomomorphism(f"map(x*y) != map(x)*map(y) at x={int(x)}, y={int(y)}")
        m.setflags(write=False)
        self.source = source
        self.target = target
        self.map = m

    def __call__(self, x: int) -> int:
        return int(self.map[x])

    @cached_property
    def is_injective(self) -> bool:
        return len(np.unique(self.map)) == self.source.order

    @cached_property
    def is_surjective(self) -> bool:
        return len(np.unique(self.map)) == self.target.order

    def image(self, subset: Iterable[int] | None = None) -> frozenset[int]:
        if subset is None:
            return frozenset(self.map.tolist())
        return frozenset(int(self.map[x]) for x in subset)

    def preimage(self, subset: Iterable[int]) -> frozenset[int]:
        mask = np.isin(self.map, np.array(sorted(set(subset)), dtype=np.int64))
        return frozenset(np.flatnonzero(mask).tolist())

    def compose(self, first: "Morphism") -> "Morphism":
        """``self o first``."""
        return Morphism(first.source, self.target, self.map[first.map])

    def as_tuple(self) -> tuple[int, ...]:
        return tuple(self.map.tolist())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Morphism)
            and self.source == other.source
            and self.target == other.target
            and np.array_equal(self.map, other.map)
        )

    def __hash__(self) -> int:
        return hash(self.map.tobytes())

    def __repr__(self) -> str:
        return f"Morphism({self.source!r} -> {self.target!r})"


def identity_morphism(G: FiniteGroup) -> Morphism:
    return Morphism(G, G, np.arange(G.order))


def direct_sum(G: FiniteGroup, H: FiniteGroup) -> FiniteGroup:
    """Componentwise product; element ``(g, h)`` has index ``g * |H| + h``."""
    m = H.order
    a = np.repeat(np.arange(G.order), m)
    b = np.tile(np.arange(m), G.order)
    table = G.table[a[:, None], a[None, :]] * m + H.table[b[:, None], b[None, :]]
    name = f"{G.name}+{H.name}" if G.name and H.name else None
    return FiniteGroup(table, G.unit * m + H.unit, name=name, validate=False)


def sum_injections(G: FiniteGroup, H: FiniteGroup, S: FiniteGroup | None = None):
    S = S if S is not None else direct_sum(G, H)
    m = H.order
    i1 = Morphism(G, S, np.arange(G.order) * m + H.unit)
    i2 = Morphism(H, S, G.unit * m + np.arange(m))
    return i1, i2


def quotient(G: FiniteGroup, N: Iterable[int]) -> tuple[FiniteGroup, Morphism]:
    N = frozenset(int(x) for x in N)
    if not G.is_subgroup(N):
        raise NotSubgroup("N is not a subgroup")
    if not G.is_normal(N):
        raise NotNormal("N is not normal")
    coset = -np.ones(G.order, dtype=np.int64)
    reps = []
    nidx = np.array(sorted(N))
    for g in range(G.order):
        if coset[g] < 0:
            coset[G.table[g, nidx]] = len(reps)
            reps.append(g)
    r = np.array(reps)
    table = coset[G.table[r[:, None], r[None, :]]]
    Q = FiniteGroup(table, int(coset[G.unit]), validate=False)
    return Q, Morphism(G, Q, coset)


def generating_set(G: FiniteGroup) -> list[int]:
    """Greedy small generating set, preferring elements of large order."""
    order = sorted(range(G.order), key=lambda x: (-int(G.element_orders[x]), x))
    gens: list[int] = []
    H = frozenset([G.unit])
    for x in order:
        if len(H) == G.order:
            break
        if x not in H:
            gens.append(x)
            H = subgroup_generated(G, gens)
    return gens


def _extend_map(G, H, gens, images):
    """Map on <gens> induced by generator images, or None if ill-defined/non-injective."""
    mapping = {G.unit: H.unit}
    used = {H.unit}
    queue = [G.unit]
    i = 0
    while i < len(queue):
        x = queue[i]
        fx = mapping[x]
        for g, h in zip(gens, images):
            y = int(G.table[x, g])
            fy = int(H.table[fx, h])
            if y in mapping:
                if mapping[y] != fy:
                    return None
            else:
                if fy in used:
                    return None
                mapping[y] = fy
                used.add(fy)
                queue.append(y)
        i += 1
    return mapping


def find_embeddings(G: FiniteGroup, H: FiniteGroup, limit: int | None = None) -> list[Morphism]:
    """Injective homomorphisms G -> H by backtracking on generator images."""
    if H.order % G.order:
        return []
    gens = generating_set(G)
    candidates = [
        [h for h in range(H.order) if H.element_orders[h] == G.element_orders[g]] for g in gens
    ]
    found: list[Morphism] = []

    def rec(level, images):
        if limit is not None and len(found) >= limit:
            return
        if level == len(gens):
            mapping = _extend_map(G, H, gens, images)
            m = [mapping[x] for x in range(G.order)]
            found.append(Morphism(G, H, m))
            return
        for h in candidates[level]:
            trial = images + [h]
            if _extend_map(G, H, gens[: level + 1], trial) is not None:
                rec(level + 1, trial)
                if limit is not None and len(found) >= limit:
                    return

    rec(0, [])
    return found


def find_isomorphism(G: FiniteGroup, H: FiniteGroup) -> Morphism | None:
    if G.fingerprint != H.fingerprint:
        return None
    emb = find_embeddings(G, H, limit=1)
    return emb[0] if emb else None


def is_isomorphic(G: FiniteGroup, H: FiniteGroup) -> bool:
    return find_isomorphism(G, H) is not None


def subgroups(G: FiniteGroup) -> list[frozenset[int]]:
    """All subgroups, built by joining cyclic subgroups until closure."""
    cyclic = {subgroup_generated(G, [x]) for x in range(G.order)}
    found = set(cyclic)
    frontier = set(cyclic)
    cyc = sorted(cyclic, key=lambda s: (len(s), sorted(s)))
    while frontier:
        new = set()
        for S in frontier:
            for C in cyc:
                if C <= S:
                    continue
                J = subgroup_generated(G, S | C)
                if J not in found:
                    new.add(J)
        found |= new
        frontier = new
    return sorted(found, key=lambda s: (len(s), sorted(s)))


def normal_subgroups(G: FiniteGroup) -> list[frozenset[int]]:
    return [S for S in subgroups(G) if G.is_normal(S)]


def restrict(G: FiniteGroup, subset: Iterable[int]) -> tuple[FiniteGroup, Morphism]:
    """The subgroup on ``subset`` as a standalone group plus its inclusion."""
    elems = sorted(set(subset))
    if not G.is_subgroup(elems):
        raise NotSubgroup("subset is not a subgroup")
    pos = {x: i for i, x in enumerate(elems)}
    idx = np.array(elems)
    sub = G.table[np.ix_(idx, idx)]
    table = np.vectorize(pos.__getitem__)(sub) if len(elems) > 1 else np.zeros((1, 1), dtype=np.int64)
    S = FiniteGroup(table, pos[G.unit], validate=False)
    return S, Morphism(S, G, idx)


def relabel_group(G: FiniteGroup, perm: Sequence[int]) -> FiniteGroup:
    """Transport ``G`` along the bijection ``old index -> perm[old]``."""
    perm = np.array(perm, dtype=np.int64)
    inv = np.empty_like(perm)
    inv[perm] = np.arange(len(perm))
    table = perm[G.table[inv[:, None], inv[None, :]]]
    return FiniteGroup(table, int(perm[G.unit]), name=G.name, validate=False)


def write_group(G: FiniteGroup) -> str:
    lines = [f"order: {G.order}", f"unit: {G.unit}"]
    lines += [" ".join(str(int(v)) for v in row) for row in G.table]
    return "\n".join(lines) + "\n"


def read_group(text: str) -> FiniteGroup:
    order = unit = None
    rows = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("order:"):
            order = int(line.split(":", 1)[1])
        elif line.startswith("unit:"):
            unit = int(line.split(":", 1)[1])
        elif line.startswith("name:"):
            continue
        else:
            rows.append([int(v) for v in line.split()])
    if order is None or unit is None:
        raise ValueError("group file needs 'order:' and 'unit:' headers")
    if len(rows) != order or any(len(r) != order for r in rows):
        raise ValueError(f"expected {order} rows of {order} entries")
    return FiniteGroup(rows, unit)
