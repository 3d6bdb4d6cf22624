"""Finite candidate pools of groups for bounded searches."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from pathlib import Path

from .groups import (
    FiniteGroup,
    direct_sum,
    is_isomorphic,
    normal_subgroups,
    quotient,
    read_group,
    restrict,
    subgroups,
    write_group,
)
from .library import abelian_groups_of_order, small_groups, trivial
from .varieties import VarietySpec


@dataclass(frozen=True, eq=False)
class Catalog:
    """An isomorphism-reduced, canonically ordered list of groups."""

    groups: tuple
    order_bound: int
    variety: str

    @property
    def fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(f"{self.variety}|{self.order_bound}".encode())
        for G in self.groups:
            h.update(write_group(G).encode())
        return h.hexdigest()[:16]

    def __iter__(self):
        return iter(self.groups)

    def __len__(self):
        return len(self.groups)

    def up_to(self, n: int) -> "Catalog":
        return Catalog(tuple(G for G in self.groups if G.order <= n), min(n, self.order_bound), self.variety)

    def find(self, G: FiniteGroup) -> int | None:
        for i, H in enumerate(self.groups):
            if H.fingerprint == G.fingerprint and is_isomorphic(G, H):
                return i
        return None


class _IsoSet:
    def __init__(self):
        self.buckets: dict = {}
        self.items: list[FiniteGroup] = []

    def add(self, G: FiniteGroup) -> bool:
        bucket = self.buckets.setdefault(G.fingerprint, [])
        if any(is_isomorphic(G, H) for H in bucket):
            return False
        bucket.append(G)
        self.items.append(G)
        return True


def _sort_key(G: FiniteGroup):
    return (G.order, G.fingerprint, write_group(G))


def pool_build(seeds, order_bound: int, variety: VarietySpec) -> Catalog:
    """Closure of the seeds under subgroups, quotients and direct sums, up to order_bound."""
    if order_bound < 1:
        raise ValueError("order_bound must be positive")
    found = _IsoSet()
    frontier = []
    # seed order must not influence which representatives are kept
    for G in [trivial()] + sorted(seeds, key=_sort_key):
        if G.order <= order_bound and found.add(G):
            frontier.append(G)
    while frontier:
        new = []
        for G in frontier:
            for S in subgroups(G):
                if len(S) < G.order:
                    new.append(restrict(G, S)[0])
            for N in normal_subgroups(G):
                if 1 < len(N) < G.order:
                    new.append(quotient(G, N)[0])
            for H in list(found.items):
                if G.order * H.order <= order_bound:
                    new.append(direct_sum(G, H))
        frontier = [G for G in new if found.add(G)]
    groups = sorted((G for G in found.items if variety.holds_in(G)), key=_sort_key)
    return Catalog(tuple(groups), order_bound, variety.name)


def abelian_pool(order_bound: int) -> Catalog:
    """Every abelian group of order <= order_bound."""
    groups = [G for n in range(1, order_bound + 1) for G in abelian_groups_of_order(n)]
    return Catalog(tuple(groups), order_bound, "abel")


def library_pool(order_bound: int, variety: VarietySpec) -> Catalog:
    return Catalog(tuple(G for G in small_groups(order_bound) if variety.holds_in(G)), order_bound, variety.name)


def nil2_pool(p: int, order_bound: int) -> Catalog:
    """Class-2 exponent-p groups generated from the relatively free groups of rank <= 3."""
    from .nil2 import baer_group, free_nil2_expp
    from .varieties import nil_exp_variety

    seeds = []
    k = 1
    while p**k <= order_bound:
        pres = free_nil2_expp(k, p)
        if pres.order <= order_bound:
            seeds.append(baer_group(pres))
        elif k == 2:
            break
        k += 1
    from .library import heisenberg

    if p**3 <= order_bound:
        seeds.append(heisenberg(p))
    return pool_build(seeds, order_bound, nil_exp_variety(2, p))


# ---------------------------------------------------------------------------
# on-disk catalogs


def save_catalog(cat: Catalog, directory) -> None:
    d = Path(directory)
    d.mkdir(parents=True, exist_ok=True)
    index = {"order_bound": cat.order_bound, "variety": cat.variety, "fingerprint": cat.fingerprint, "groups": []}
    for i, G in enumerate(cat.groups):
        name = f"g{i:04d}.grp"
        (d / name).write_text(write_group(G))
        index["groups"].append(
            {"file": name, "order": G.order, "exponent": G.exponent, "class": G.nilpotency_class, "name": G.name}
        )
    (d / "index.json").write_text(json.dumps(index, indent=1, sort_keys=True) + "\n")


def load_catalog(directory) -> Catalog:
    d = Path(directory)
    index = json.loads((d / "index.json").read_text())
    groups = []
    for entry in index["groups"]:
        G = read_group((d / entry["file"]).read_text())
        G.name = entry.get("name")
        groups.append(G)
    cat = Catalog(tuple(groups), index["order_bound"], index["variety"])
    if cat.fingerprint != index["fingerprint"]:
        raise ValueError("catalog fingerprint mismatch")
    return cat
