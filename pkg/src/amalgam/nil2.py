"""Class-2 exponent-p groups (p odd) through alternating bilinear maps over F_p.

A presentation ``(p, V, W, beta, P)`` describes the group on ``V x W`` with
``(v, w)(v', w') = (v + v', w + w' + beta(v, v') / 2)``. Elements are indexed
by their coordinate vector ``(v, w)`` read as a base-p numeral, V first.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from . import fp
from .errors import (
    EvenPrime,
    IncompatiblePredicates,
    NotInjective,
    PreconditionFailed,
    TableTooLarge,
    WrongVariety,
)
from .groups import FiniteGroup, Morphism, identity_morphism, subgroup_generated

DEFAULT_TABLE_CAP = 3**8


def _is_prime(n: int) -> bool:
    return n >= 2 and all(n % d for d in range(2, int(n**0.5) + 1))


@dataclass(frozen=True, eq=False)
class Nil2Presentation:
    p: int
    dV: int
    dW: int
    beta: np.ndarray  # shape (dW, dV, dV)
    P: np.ndarray = field(default=None)  # rows spanning the predicate subspace of W

    def __post_init__(self):
        p = self.p
        if p == 2:
            raise EvenPrime("the Baer correspondence needs an odd prime")
        if not _is_prime(p):
            raise ValueError(f"{p} is not prime")
        b = np.array(self.beta, dtype=np.int64).reshape(self.dW, self.dV, self.dV) % p
        if np.any((b + b.transpose(0, 2, 1)) % p) or np.any(np.diagonal(b, axis1=1, axis2=2)):
            raise ValueError("beta must be alternating")
        b.setflags(write=False)
        object.__setattr__(self, "beta", b)
        P = np.eye(self.dW, dtype=np.int64) if self.P is None else np.array(self.P, dtype=np.int64).reshape(-1, self.dW)
        P = fp.row_basis(P % p, p, self.dW)
        if not all(fp.in_span(P, v, p) for v in self.image_vectors()):
            raise ValueError("the predicate must contain the image of beta")
        P.setflags(write=False)
        object.__setattr__(self, "P", P)

    @property
    def order(self) -> int:
        return self.p ** (self.dV + self.dW)

    def image_vectors(self) -> list[np.ndarray]:
        return [self.beta[:, i, j] for i in range(self.dV) for j in range(i + 1, self.dV)]

    def image_span(self) -> np.ndarray:
        vecs = self.image_vectors()
        if not vecs:
            return np.zeros((0, self.dW), dtype=np.int64)
        return fp.row_basis(np.array(vecs), self.p, self.dW)

    def form(self, v, u) -> np.ndarray:
        return np.einsum("i,kij,j->k", np.asarray(v), self.beta, np.asarray(u)) % self.p

    def index(self, v, w) -> int:
        digits = list(np.asarray(v) % self.p) + list(np.asarray(w) % self.p)
        out = 0
        for d in digits:
            out = out * self.p + int(d)
        return out

    def coords(self, idx: int) -> tuple[np.ndarray, np.ndarray]:
        d = self.dV + self.dW
        digits = []
        for _ in range(d):
            digits.append(idx % self.p)
            idx //= self.p
        digits = np.array(digits[::-1], dtype=np.int64)
        return digits[: self.dV], digits[self.dV :]

    def to_text(self) -> str:
        lines = [f"p: {self.p}", f"dimV: {self.dV}", f"dimW: {self.dW}"]
        for k in range(self.dW):
            lines.append(f"# beta component {k}")
            lines += [" ".join(str(int(x)) for x in row) for row in self.beta[k]]
        lines.append("# predicate basis")
        lines += [" ".join(str(int(x)) for x in row) for row in self.P]
        return "\n".join(lines) + "\n"

    def __eq__(self, other):
        return (
            isinstance(other, Nil2Presentation)
            and (self.p, self.dV, self.dW) == (other.p, other.dV, other.dW)
            and np.array_equal(self.beta, other.beta)
            and np.array_equal(self.P, other.P)
        )

    def __hash__(self):
        return hash((self.p, self.dV, self.dW, self.beta.tobytes(), self.P.tobytes()))


def read_presentation(text: str) -> Nil2Presentation:
    head, rows = {}, []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" in line:
            k, v = line.split(":", 1)
            head[k.strip()] = int(v)
        else:
            rows.append([int(x) for x in line.split()])
    p, dV, dW = head["p"], head["dimV"], head["dimW"]
    beta = np.array(rows[: dW * dV], dtype=np.int64).reshape(dW, dV, dV)
    extra = rows[dW * dV :]
    # no predicate rows means P = W
    P = np.array(extra, dtype=np.int64).reshape(-1, dW) if extra else None
    return Nil2Presentation(p, dV, dW, beta, P)


def symplectic(p: int) -> Nil2Presentation:
    """dV = 2, dW = 1, beta(e0, e1) = 1."""
    return Nil2Presentation(p, 2, 1, np.array([[[0, 1], [p - 1, 0]]]))


def all_coords(p: int, d: int) -> np.ndarray:
    if d == 0:
        return np.zeros((1, 0), dtype=np.int64)
    return np.array(list(itertools.product(range(p), repeat=d)), dtype=np.int64)


def baer_group(pres: Nil2Presentation, cap: int = DEFAULT_TABLE_CAP, validate: bool = False) -> FiniteGroup:
    n = pres.order
    if n > cap:
        raise TableTooLarge(f"group of order {n} exceeds the table cap {cap}")
    p, dV = pres.p, pres.dV
    half = (p + 1) // 2
    X = all_coords(p, dV + pres.dW)
    weights = p ** np.arange(dV + pres.dW - 1, -1, -1, dtype=np.int64)
    V = X[:, :dV]
    table = np.zeros((n, n), dtype=np.int64)
    for k in range(dV + pres.dW):
        col = X[:, k][:, None] + X[:, k][None, :]
        if k >= dV:
            B = pres.beta[k - dV]
            col = col + half * (V @ B @ V.T)
        table += (col % p) * weights[k]
    name = f"Baer(p={p},{dV},{pres.dW})"
    return FiniteGroup(table, 0, name=name, validate=validate)


def free_nil2_expp(k: int, p: int) -> Nil2Presentation:
    """Relatively free group of rank k: W is the exterior square of V."""
    pairs = list(itertools.combinations(range(k), 2))
    beta = np.zeros((len(pairs), k, k), dtype=np.int64)
    for c, (i, j) in enumerate(pairs):
        beta[c, i, j] = 1
        beta[c, j, i] = p - 1
    return Nil2Presentation(p, k, len(pairs), beta)


# ---------------------------------------------------------------------------
# groups -> presentations


def check_variety(G: FiniteGroup, p: int) -> None:
    if p == 2:
        raise EvenPrime("p must be odd")
    if G.exponent not in (1, p):
        raise WrongVariety(f"exponent {G.exponent} does not divide {p}")
    c = G.nilpotency_class
    if c is None or c > 2:
        raise WrongVariety("nilpotency class exceeds 2")


def _independent(G: FiniteGroup, base: frozenset, candidates, p: int):
    """Greedy elements independent modulo the subgroup ``base`` (elementary abelian quotient)."""
    chosen = []
    H = base
    for x in candidates:
        if x not in H:
            chosen.append(x)
            H = subgroup_generated(G, set(H) | {x})
    return chosen, H


@dataclass(frozen=True, eq=False)
class BaerCoordinates:
    """A presentation of G with an explicit isomorphism ``phi: baer_group(pres) -> G``."""

    pres: Nil2Presentation
    phi: Morphism
    v_lifts: tuple
    w_basis: tuple

    def coords_of(self, g: int):
        idx = int(np.flatnonzero(self.phi.map == g)[0])
        return self.pres.coords(idx)


def baer_coordinates(G: FiniteGroup, p: int, P=None, lifts=()) -> BaerCoordinates:
    """Coordinates with W = P (default G') and V-lifts starting with ``lifts``."""
    check_variety(G, p)
    P = frozenset(G.derived if P is None else P)
    _check_predicate(G, P)
    w_basis, _ = _independent(G, frozenset([G.unit]), sorted(P), p)
    lifts = list(lifts)
    v_basis, H = _independent(G, P, lifts, p)
    if len(v_basis) != len(lifts):
        raise PreconditionFailed("requested lifts are dependent modulo P")
    more, H = _independent(G, H, range(G.order), p)
    v_basis += more
    dV, dW = len(v_basis), len(w_basis)
    # discrete logarithm in P
    zlog = {}
    for f in itertools.product(range(p), repeat=dW):
        x = G.unit
        for z, e in zip(w_basis, f):
            x = G.mul(x, G.power(z, e))
        zlog[x] = np.array(f, dtype=np.int64)
    beta = np.zeros((dW, dV, dV), dtype=np.int64)
    for i, j in itertools.combinations(range(dV), 2):
        c = zlog[G.commutator(v_basis[i], v_basis[j])]
        beta[:, i, j] = c
        beta[:, j, i] = (-c) % p
    pres = Nil2Presentation(p, dV, dW, beta)
    half = (p + 1) // 2
    mapping = np.empty(pres.order, dtype=np.int64)
    for idx in range(pres.order):
        v, w = pres.coords(idx)
        corr = np.zeros(dW, dtype=np.int64)
        for i, j in itertools.combinations(range(dV), 2):
            corr = corr + v[i] * v[j] * beta[:, i, j]
        wz = (w - half * corr) % p
        x = G.unit
        for g, e in zip(v_basis, v):
            x = G.mul(x, G.power(g, int(e)))
        for z, e in zip(w_basis, wz):
            x = G.mul(x, G.power(z, int(e)))
        mapping[idx] = x
    phi = Morphism(baer_group(pres, cap=max(DEFAULT_TABLE_CAP, pres.order)), G, mapping)
    if not phi.is_injective:
        raise AssertionError("coordinate map is not bijective")
    return BaerCoordinates(pres, phi, tuple(v_basis), tuple(w_basis))


def presentation_of(G: FiniteGroup, p: int, P=None) -> Nil2Presentation:
    return baer_coordinates(G, p, P).pres


def _check_predicate(G: FiniteGroup, P: frozenset) -> None:
    if not G.is_subgroup(P):
        raise IncompatiblePredicates("predicate is not a subgroup")
    if not (G.derived <= P <= G.center):
        raise IncompatiblePredicates("predicate must lie between G' and Z(G)")


# ---------------------------------------------------------------------------
# amalgamation bases


def is_amalgamation_base(G: FiniteGroup, p: int | None = None) -> bool:
    p = p or (G.exponent if G.exponent > 1 else 3)
    check_variety(G, p)
    return G.derived == G.center


def embed_into_amalg_base(G0: FiniteGroup, p: int | None = None):
    """A group G1 with G1' = Z(G1) and an embedding of G0 into it.

    The centre of G0 splits as G0' plus a complement E; every basis vector of E
    is made a commutator with one new V-generator each.
    """
    p = p or (G0.exponent if G0.exponent > 1 else 3)
    check_variety(G0, p)
    if G0.derived == G0.center:
        return G0, identity_morphism(G0)
    bc = baer_coordinates(G0, p, P=G0.center)
    pres0 = bc.pres
    dV0, dW = pres0.dV, pres0.dW
    img = pres0.image_span()
    extra = fp.extend_basis(img, p, dW) if dW else np.zeros((0, dW), dtype=np.int64)
    k = len(extra)
    anchors = list(range(dV0))
    new_anchor = dV0 == 0
    dV1 = dV0 + k + (1 if new_anchor else 0)
    if new_anchor:
        anchors = [dV0]
    first_u = dV0 + (1 if new_anchor else 0)
    beta = np.zeros((dW, dV1, dV1), dtype=np.int64)
    beta[:, :dV0, :dV0] = pres0.beta
    for i, e in enumerate(extra):
        u = first_u + i
        partner = anchors[i] if i < len(anchors) else first_u
        beta[:, u, partner] = (beta[:, u, partner] + e) % p
        beta[:, partner, u] = (beta[:, partner, u] - e) % p
    pres1 = Nil2Presentation(p, dV1, dW, beta)
    G1 = baer_group(pres1, cap=max(DEFAULT_TABLE_CAP, pres1.order))
    inc = np.empty(pres0.order, dtype=np.int64)
    for idx in range(pres0.order):
        v, w = pres0.coords(idx)
        inc[idx] = pres1.index(list(v) + [0] * (dV1 - dV0), w)
    inverse_phi = np.empty(G0.order, dtype=np.int64)
    inverse_phi[bc.phi.map] = np.arange(G0.order)
    e = Morphism(G0, G1, inc[inverse_phi])
    return G1, e


# ---------------------------------------------------------------------------
# amalgams


@dataclass(frozen=True, eq=False)
class Nil2Amalgam:
    group: FiniteGroup
    j1: Morphism
    j2: Morphism
    predicate: frozenset
    presentation: Nil2Presentation


def _pullback(e: Morphism, P) -> frozenset:
    return e.preimage(P)


def nil2_amalgam(e1: Morphism, e2: Morphism, p: int | None = None, P0=None, P1=None, P2=None) -> Nil2Amalgam:
    """Amalgam of two embeddings of G0 built on adapted presentations.

    P1 and P2 default to the derived subgroups and P0 to the pullback of P1;
    the three must satisfy P0 = e1^-1(P1) = e2^-1(P2).
    """
    G0, G1, G2 = e1.source, e1.target, e2.target
    if e2.source != G0:
        raise PreconditionFailed("the two embeddings must share their source")
    if not (e1.is_injective and e2.is_injective):
        raise NotInjective("amalgamation needs embeddings")
    exps = {G.exponent for G in (G0, G1, G2)} - {1}
    p = p or (exps.pop() if len(exps) == 1 else 3)
    for G in (G0, G1, G2):
        check_variety(G, p)
    P1 = frozenset(G1.derived if P1 is None else P1)
    P2 = frozenset(G2.derived if P2 is None else P2)
    P0 = frozenset(_pullback(e1, P1) if P0 is None else P0)
    for G, P in ((G0, P0), (G1, P1), (G2, P2)):
        _check_predicate(G, P)
    if _pullback(e1, P1) != P0 or _pullback(e2, P2) != P0:
        raise IncompatiblePredicates("P0 must equal the restriction of P1 and of P2")

    c0 = baer_coordinates(G0, p, P0)
    c1 = baer_coordinates(G1, p, P1, lifts=[e1(g) for g in c0.v_lifts])
    c2 = baer_coordinates(G2, p, P2, lifts=[e2(g) for g in c0.v_lifts])
    a0, a1, a2 = c0.pres.dV, c1.pres.dV, c2.pres.dV
    d0, d1, d2 = c0.pres.dW, c1.pres.dW, c2.pres.dW
    M1 = np.array([c1.coords_of(e1(z))[1] for z in c0.w_basis], dtype=np.int64).reshape(d0, d1)
    M2 = np.array([c2.coords_of(e2(z))[1] for z in c0.w_basis], dtype=np.int64).reshape(d0, d2)
    # W3 = (W1 + W2) / {(M1 x, -M2 x)}
    R = np.concatenate([M1, (-M2) % p], axis=1) % p
    dsum = d1 + d2
    added = fp.extend_basis(R, p, dsum)
    basis = np.concatenate([fp.row_basis(R, p, dsum), added]) if dsum else np.zeros((0, 0), dtype=np.int64)
    r = len(basis) - len(added)
    d3 = len(added)

    def proj(vec):
        if d3 == 0:
            return np.zeros(0, dtype=np.int64)
        return fp.solve_coords(basis, np.asarray(vec).reshape(1, -1), p)[0][r:] % p

    def from1(w):
        return proj(np.concatenate([w, np.zeros(d2, dtype=np.int64)]))

    def from2(w):
        return proj(np.concatenate([np.zeros(d1, dtype=np.int64), w]))

    dV3 = a1 + a2 - a0
    idx1 = list(range(a1))
    idx2 = list(range(a0)) + list(range(a1, a1 + a2 - a0))
    beta = np.zeros((d3, dV3, dV3), dtype=np.int64)
    for i, j in itertools.combinations(range(a1), 2):
        val = from1(c1.pres.beta[:, i, j])
        beta[:, idx1[i], idx1[j]] = val
        beta[:, idx1[j], idx1[i]] = (-val) % p
    for i, j in itertools.combinations(range(a2), 2):
        val = from2(c2.pres.beta[:, i, j])
        I, J = idx2[i], idx2[j]
        if i < a0 and j < a0 and np.any((beta[:, I, J] - val) % p):
            raise AssertionError("legs disagree on the common part")
        beta[:, I, J] = val
        beta[:, J, I] = (-val) % p
    pres3 = Nil2Presentation(p, dV3, d3, beta)
    G3 = baer_group(pres3)

    def leg(c, idx, into, G):
        m = np.empty(G.order, dtype=np.int64)
        inv = np.empty(G.order, dtype=np.int64)
        inv[c.phi.map] = np.arange(G.order)
        for g in range(G.order):
            v, w = c.pres.coords(int(inv[g]))
            v3 = np.zeros(dV3, dtype=np.int64)
            v3[idx] = v
            m[g] = pres3.index(v3, into(w))
        return Morphism(G, G3, m)

    j1 = leg(c1, idx1, from1, G1)
    j2 = leg(c2, idx2, from2, G2)
    if not (j1.is_injective and j2.is_injective):
        raise AssertionError("amalgam legs are not injective")
    if j1.compose(e1) != j2.compose(e2):
        raise AssertionError("amalgam square does not commute")
    P3 = frozenset(pres3.index(np.zeros(dV3, dtype=np.int64), w) for w in all_coords(p, d3))
    return Nil2Amalgam(G3, j1, j2, P3, pres3)


def predicate_restrictions_hold(am: Nil2Amalgam, P1, P2) -> bool:
    """P3 pulled back along each leg gives back P1 and P2."""
    return am.j1.preimage(am.predicate) == frozenset(P1) and am.j2.preimage(am.predicate) == frozenset(P2)
