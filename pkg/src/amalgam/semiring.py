"""Presentations of groups, semigroups and rings, and the group-to-semigroup rewriting."""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

from .completion import algebra_complete_within
from .diagrams import Diagram, default_labels
from .errors import NotAGroupPresentation, PreconditionFailed
from .groups import FiniteGroup

UNIT_SYMBOL = "e1"
_SYMBOL = re.compile(r"[A-Za-z_][A-Za-z0-9_']*")


@dataclass(frozen=True)
class Presentation:
    """Generators and relations.

    Group and semigroup relations are pairs of words; a word is a tuple of
    ``(symbol, exponent)`` with exponent +1 or -1 (semigroups: +1 only) and
    the empty word stands for 1. Ring relations are pairs of polynomials, each
    a tuple of ``(coefficient, monomial)`` with monomials tuples of symbols.
    """

    kind: str
    generators: tuple
    relations: tuple

    def __post_init__(self):
        if self.kind not in ("group", "semigroup", "ring"):
            raise PreconditionFailed(f"unknown presentation kind {self.kind!r}")
        gens = set(self.generators)
        if len(gens) != len(self.generators):
            raise PreconditionFailed("repeated generator")
        for lhs, rhs in self.relations:
            for sym in _symbols(self.kind, lhs) | _symbols(self.kind, rhs):
                if sym not in gens:
                    raise PreconditionFailed(f"undeclared symbol {sym!r}")
            if self.kind == "semigroup" and any(e != 1 for side in (lhs, rhs) for _, e in side):
                raise PreconditionFailed("semigroup words must be positive")

    def to_text(self) -> str:
        lines = [f"kind: {self.kind}", "gens: " + " ".join(self.generators)]
        for lhs, rhs in self.relations:
            fmt = _fmt_poly if self.kind == "ring" else _fmt_word
            lines.append(f"rel: {fmt(lhs)} = {fmt(rhs)}")
        return "\n".join(lines) + "\n"


def _symbols(kind, side) -> set:
    if kind == "ring":
        return {s for _, mono in side for s in mono}
    return {s for s, _ in side}


def _fmt_word(w) -> str:
    if not w:
        return "1"
    return "*".join(s if e == 1 else f"{s}^{e}" for s, e in w)


def _fmt_poly(poly) -> str:
    if not poly:
        return "0"
    out = []
    for i, (c, mono) in enumerate(poly):
        body = "*".join(mono)
        mag = abs(c)
        term = body if mag == 1 and body else (f"{mag}*{body}" if body else str(mag))
        sign = "-" if c < 0 else "+"
        out.append(("-" if c < 0 else "") + term if i == 0 else f" {sign} {term}")
    return "".join(out)


def parse_word(text: str, allow_negative: bool = True) -> tuple:
    text = text.strip()
    if text in ("1", ""):
        return ()
    out = []
    for tok in text.split("*"):
        tok = tok.strip()
        m = re.fullmatch(r"([A-Za-z_][A-Za-z0-9_']*)(?:\^(-?\d+))?", tok)
        if not m:
            raise PreconditionFailed(f"bad word factor {tok!r}")
        k = int(m.group(2) or 1)
        if k == 0 or (k < 0 and not allow_negative):
            raise PreconditionFailed(f"exponent {k} not allowed here")
        out.extend([(m.group(1), 1 if k > 0 else -1)] * abs(k))
    return tuple(out)


def parse_poly(text: str) -> tuple:
    text = text.replace(" ", "")
    if text in ("0", ""):
        return ()
    terms = re.findall(r"([+-]?)([^+-]+)", text)
    out = []
    for sign, body in terms:
        coeff, mono = 1, []
        for f in body.split("*"):
            if re.fullmatch(r"\d+", f):
                coeff *= int(f)
            elif _SYMBOL.fullmatch(f):
                mono.append(f)
            else:
                raise PreconditionFailed(f"bad ring factor {f!r}")
        out.append((-coeff if sign == "-" else coeff, tuple(mono)))
    return tuple(out)


def parse_presentation(text: str) -> Presentation:
    kind, gens, rels = None, None, []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        key, _, rest = line.partition(":")
        key, rest = key.strip(), rest.strip()
        if key == "kind":
            kind = rest
        elif key == "gens":
            gens = tuple(rest.split())
        elif key == "rel":
            rels.append(rest)
        else:
            raise PreconditionFailed(f"unknown presentation field {key!r}")
    if kind is None or gens is None:
        raise PreconditionFailed("presentation needs kind and gens lines")
    relations = []
    for r in rels:
        lhs, eq, rhs = r.partition("=")
        if not eq:
            raise PreconditionFailed(f"relation without '=': {r!r}")
        if kind == "ring":
            relations.append((parse_poly(lhs), parse_poly(rhs)))
        else:
            neg = kind == "group"
            relations.append((parse_word(lhs, neg), parse_word(rhs, neg)))
    return Presentation(kind, gens, tuple(relations))


# ---------------------------------------------------------------------------
# rewriting


def _fresh(name: str, taken: set) -> str:
    while name in taken:
        name += "'"
    taken.add(name)
    return name


def group_to_semigroup_presentation(P: Presentation) -> Presentation:
    """Positive presentation on the generators, formal inverses and a unit symbol."""
    if P.kind != "group":
        raise NotAGroupPresentation(f"expected a group presentation, got {P.kind}")
    taken = set(P.generators)
    inverse = {g: _fresh(g + "'", taken) for g in P.generators}
    unit = _fresh(UNIT_SYMBOL, taken)
    letters = list(P.generators) + [inverse[g] for g in P.generators]
    one = ((unit, 1),)
    rels = []
    for x in letters:
        rels.append((((x, 1), (unit, 1)), ((x, 1),)))
        rels.append((((unit, 1), (x, 1)), ((x, 1),)))
    rels.append((((unit, 1), (unit, 1)), one))
    for g in P.generators:
        rels.append((((g, 1), (inverse[g], 1)), one))
        rels.append((((inverse[g], 1), (g, 1)), one))

    def positive(w):
        return tuple((s if e == 1 else inverse[s], 1) for s, e in w) or one

    for lhs, rhs in P.relations:
        rels.append((positive(lhs), positive(rhs)))
    return Presentation("semigroup", tuple(letters) + (unit,), tuple(rels))


def full_table_presentation(G: FiniteGroup) -> tuple[Presentation, dict]:
    """Generators g<i> for the non-identity elements, one relator per product."""
    names = {x: f"g{x}" for x in range(G.order) if x != G.unit}

    def word(x):
        return () if x == G.unit else ((names[x], 1),)

    rels = []
    for a in names:
        for b in names:
            rels.append((word(a) + word(b), word(int(G.table[a, b]))))
    return Presentation("group", tuple(names.values()), tuple(rels)), names


def _word_value(G: FiniteGroup, w, value: dict) -> list[int]:
    """Values of the prefixes of a positive word."""
    out = []
    cur = None
    for s, _ in w:
        cur = value[s] if cur is None else int(G.table[cur, value[s]])
        out.append(cur)
    return out


def semigroup_diagram(G: FiniteGroup, S: Presentation, value: dict, labels) -> Diagram:
    """Cells recording the value in G of every prefix product in S's relations."""
    cells = set()
    for lhs, rhs in S.relations:
        for w in (lhs, rhs):
            pre = _word_value(G, w, value)
            for i in range(1, len(w)):
                cells.add(("mul", (labels[pre[i - 1]], labels[value[w[i][0]]]), labels[pre[i]]))
    return Diagram("semigroup", labels, cells)


def rewrite_correctness_check(G: FiniteGroup, bound: int | None = None) -> bool:
    """Rewrite a full-table presentation of G and recover G as the unique completion."""
    P, names = full_table_presentation(G)
    S = group_to_semigroup_presentation(P)
    n = len(P.generators)
    if len(S.generators) != 2 * n + 1 or len(S.relations) != 6 * n + 1 + len(P.relations):
        return False
    value = {names[x]: x for x in names}
    inv_names = S.generators[n : 2 * n]
    for g, gi in zip(P.generators, inv_names):
        value[gi] = G.inv(value[g])
    value[S.generators[-1]] = G.unit
    labels = default_labels(G)
    D = semigroup_diagram(G, S, value, labels)
    comps = algebra_complete_within(D, "semigroup", bound or G.order)
    if len(comps) != 1:
        return False
    m = comps[0].mapping
    T = comps[0].algebra.table
    pos = np.array([m[labels[x]] for x in range(G.order)])
    return comps[0].order == G.order and bool(np.array_equal(T[pos[:, None], pos[None, :]], pos[G.table]))
