"""Bounded forcing over group diagrams, generic checks and the extension game.

Conditions are consistent group diagrams built from multiplication cells. The
extensions of a condition p are p itself and every consistent q containing p
whose labels lie in {1..B} and which has at most s cells. Verdicts are
relative to (B, s).
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass
from typing import Callable, Union

from .completion import candidate_groups, complete_within, group_labelings
from .diagrams import Diagram, EnumeratedApprox, check_partial_consistency, extends
from .library import LIBRARY_MAX_ORDER
from .errors import BoundExceeded, PreconditionFailed, StrategyViolation
from .varieties import GROUPS, VarietySpec

FORCES = "Forces"
FORCES_NEGATION = "ForcesNegation"
NEITHER = "Neither"


# ---------------------------------------------------------------------------
# sentences

Term = Union[int, str]  # a label or a bound variable


@dataclass(frozen=True)
class Mul:
    left: Term
    right: Term
    value: Term


@dataclass(frozen=True)
class Eq:
    left: Term
    right: Term


@dataclass(frozen=True)
class Not:
    body: "Sentence"


@dataclass(frozen=True)
class Or:
    left: "Sentence"
    right: "Sentence"


@dataclass(frozen=True)
class Exists:
    var: str
    body: "Sentence"


Sentence = Union[Mul, Eq, Not, Or, Exists]


def And(a: Sentence, b: Sentence) -> Sentence:
    return Not(Or(Not(a), Not(b)))


def _terms(phi) -> tuple:
    if isinstance(phi, Mul):
        return (phi.left, phi.right, phi.value)
    if isinstance(phi, Eq):
        return (phi.left, phi.right)
    return ()


def substitute(phi: Sentence, var: str, label: int) -> Sentence:
    def t(x):
        return label if x == var else x

    if isinstance(phi, Mul):
        return Mul(t(phi.left), t(phi.right), t(phi.value))
    if isinstance(phi, Eq):
        return Eq(t(phi.left), t(phi.right))
    if isinstance(phi, Not):
        return Not(substitute(phi.body, var, label))
    if isinstance(phi, Or):
        return Or(substitute(phi.left, var, label), substitute(phi.right, var, label))
    if phi.var == var:
        return phi
    return Exists(phi.var, substitute(phi.body, var, label))


def free_variables(phi: Sentence) -> set:
    if isinstance(phi, (Mul, Eq)):
        return {x for x in _terms(phi) if isinstance(x, str)}
    if isinstance(phi, Not):
        return free_variables(phi.body)
    if isinstance(phi, Or):
        return free_variables(phi.left) | free_variables(phi.right)
    return free_variables(phi.body) - {phi.var}


def labels_of(phi: Sentence) -> set:
    if isinstance(phi, (Mul, Eq)):
        return {x for x in _terms(phi) if isinstance(x, int)}
    if isinstance(phi, Not):
        return labels_of(phi.body)
    if isinstance(phi, Or):
        return labels_of(phi.left) | labels_of(phi.right)
    return labels_of(phi.body)


def is_positive(phi: Sentence) -> bool:
    if isinstance(phi, (Mul, Eq)):
        return True
    if isinstance(phi, Not):
        return False
    if isinstance(phi, Or):
        return is_positive(phi.left) and is_positive(phi.right)
    return is_positive(phi.body)


def format_sentence(phi: Sentence) -> str:
    if isinstance(phi, Mul):
        return f"{phi.left}*{phi.right}={phi.value}"
    if isinstance(phi, Eq):
        return f"{phi.left}={phi.right}"
    if isinstance(phi, Not):
        return f"not({format_sentence(phi.body)})"
    if isinstance(phi, Or):
        return f"or({format_sentence(phi.left)},{format_sentence(phi.right)})"
    return f"exists {phi.var} ({format_sentence(phi.body)})"


_TOKEN = re.compile(r"\s*(exists|not|or|and|!=|[A-Za-z_]\w*|\d+|[()*=,])")


def parse_sentence(text: str) -> Sentence:
    """Parse ``a*b=c``, ``x=1``, ``x!=1``, ``not(..)``, ``or(..,..)``, ``and(..,..)``, ``exists x (..)``."""
    toks = []
    pos = 0
    text = text.strip()
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise PreconditionFailed(f"cannot parse sentence at {text[pos:]!r}")
        toks.append(m.group(1))
        pos = m.end()
        while pos < len(text) and text[pos].isspace():
            pos += 1
    phi, rest = _parse(toks, 0)
    if rest != len(toks):
        raise PreconditionFailed(f"trailing input in sentence {text!r}")
    if free_variables(phi):
        raise PreconditionFailed(f"free variables {sorted(free_variables(phi))} in sentence")
    return phi


def _expect(toks, i, tok):
    if i >= len(toks) or toks[i] != tok:
        raise PreconditionFailed(f"expected {tok!r} in sentence")
    return i + 1


def _term(tok):
    return int(tok) if tok.isdigit() else tok


def _parse(toks, i):
    if i >= len(toks):
        raise PreconditionFailed("unexpected end of sentence")
    head = toks[i]
    if head == "not":
        i = _expect(toks, i + 1, "(")
        body, i = _parse(toks, i)
        return Not(body), _expect(toks, i, ")")
    if head in ("or", "and"):
        i = _expect(toks, i + 1, "(")
        a, i = _parse(toks, i)
        i = _expect(toks, i, ",")
        b, i = _parse(toks, i)
        i = _expect(toks, i, ")")
        return (Or(a, b) if head == "or" else And(a, b)), i
    if head == "exists":
        var = toks[i + 1]
        i = _expect(toks, i + 2, "(")
        body, i = _parse(toks, i)
        return Exists(var, body), _expect(toks, i, ")")
    a = _term(head)
    if i + 1 < len(toks) and toks[i + 1] == "*":
        b = _term(toks[i + 2])
        i = _expect(toks, i + 3, "=")
        return Mul(a, b, _term(toks[i])), i + 1
    if i + 1 < len(toks) and toks[i + 1] in ("=", "!="):
        atom = Eq(a, _term(toks[i + 2]))
        return (atom if toks[i + 1] == "=" else Not(atom)), i + 3
    raise PreconditionFailed(f"unexpected token {head!r} in sentence")


# ---------------------------------------------------------------------------
# conditions


@dataclass(frozen=True)
class Condition:
    """A group diagram with a completion of order <= order_bound in the variety."""

    diagram: Diagram
    variety: VarietySpec = GROUPS
    order_bound: int = 6

    def __post_init__(self):
        if self.diagram.kind != "group":
            raise PreconditionFailed("forcing conditions are group diagrams")
        if not _has_completion(self.diagram, self.variety, self.order_bound):
            raise PreconditionFailed(f"condition has no completion of order <= {self.order_bound} in {self.variety.name}")

    @classmethod
    def parse(cls, text: str, variety: VarietySpec = GROUPS, order_bound: int = 6) -> "Condition":
        """Comma-separated cells such as ``2*2=1, 2*3=4``; an empty string gives {1}."""
        mul = {}
        dom = {1}
        for part in filter(None, (x.strip() for x in text.split(","))):
            m = re.fullmatch(r"(\d+)\s*\*\s*(\d+)\s*=\s*(\d+)", part)
            if not m:
                raise PreconditionFailed(f"bad condition cell {part!r}")
            a, b, c = (int(x) for x in m.groups())
            if mul.get((a, b), c) != c:
                raise PreconditionFailed(f"cell {a}*{b} given twice")
            mul[(a, b)] = c
            dom |= {a, b, c}
        return cls(Diagram.group(dom, mul), variety, order_bound)


def _has_completion(D: Diagram, V: VarietySpec, order_bound: int) -> bool:
    if len(D.domain) > order_bound or not check_partial_consistency(D).ok:
        return False
    return any(group_labelings(D, G, limit=1) for G in candidate_groups(V, order_bound))


class _Forcer:
    """Memoised forcing at fixed (B, s, variety, completion bound)."""

    def __init__(self, B: int, s: int, V: VarietySpec, order_bound: int):
        self.B, self.s, self.V, self.order_bound = B, s, V, order_bound
        self.universe = [(a, b, c) for a in range(1, B + 1) for b in range(1, B + 1) for c in range(1, B + 1)]
        self._valid: dict = {}
        self._forces: dict = {}
        self._can: dict = {}

    # a state is (domain, cells) with cells a frozenset of diagram cells
    def valid(self, state) -> bool:
        if state not in self._valid:
            dom, cells = state
            D = Diagram("group", dom, cells)
            self._valid[state] = _has_completion(D, self.V, self.order_bound)
        return self._valid[state]

    def add(self, state, a, b, c):
        dom, cells = state
        return (dom | {a, b, c}, cells | {("mul", (a, b), c)})

    @staticmethod
    def defined(state, a, b):
        return any(op == "mul" and args == (a, b) for op, args, _ in state[1])

    def forces(self, state, phi) -> bool:
        key = (state, phi)
        if key not in self._forces:
            self._forces[key] = self._forces_uncached(state, phi)
        return self._forces[key]

    def _forces_uncached(self, state, phi) -> bool:
        if isinstance(phi, Mul):
            return ("mul", (phi.left, phi.right), phi.value) in state[1]
        if isinstance(phi, Eq):
            return phi.left == phi.right
        if isinstance(phi, Not):
            return not self.can_force(state, phi.body)
        if isinstance(phi, Or):
            return self.forces(state, phi.left) or self.forces(state, phi.right)
        return any(self.forces(state, substitute(phi.body, phi.var, c)) for c in range(1, self.B + 1))

    def can_force(self, state, phi) -> bool:
        """Some extension of the state forces phi."""
        key = (state, phi)
        if key not in self._can:
            self._can[key] = self._can_uncached(state, phi)
        return self._can[key]

    def _can_uncached(self, state, phi) -> bool:
        if self.forces(state, phi):
            return True
        if isinstance(phi, Mul):
            if len(state[1]) >= self.s or self.defined(state, phi.left, phi.right):
                return False
            return self.valid(self.add(state, phi.left, phi.right, phi.value))
        if isinstance(phi, Eq):
            return False
        if isinstance(phi, Or):
            return self.can_force(state, phi.left) or self.can_force(state, phi.right)
        if isinstance(phi, Exists):
            return any(self.can_force(state, substitute(phi.body, phi.var, c)) for c in range(1, self.B + 1))
        return self._search_negation(state, phi, 0)

    def _search_negation(self, state, phi: Not, start: int) -> bool:
        # forcing a negation is inherited by extensions, so a depth-first
        # walk over cell sets in index order finds a witness if one exists
        if self.forces(state, phi):
            return True
        if self.forces(state, phi.body) or len(state[1]) >= self.s:
            return False
        for i in range(start, len(self.universe)):
            a, b, c = self.universe[i]
            if self.defined(state, a, b):
                continue
            nxt = self.add(state, a, b, c)
            if self.valid(nxt) and self._search_negation(nxt, phi, i + 1):
                return True
        return False


_FORCERS: dict = {}


def _forcer(B, s, V, order_bound) -> _Forcer:
    key = (B, s, V.name, order_bound)
    if key not in _FORCERS:
        _FORCERS[key] = _Forcer(B, s, V, order_bound)
    return _FORCERS[key]


def _state(D: Diagram):
    return (frozenset(D.domain), frozenset(D.cells))


def _check_bounds(p: Condition, phi: Sentence, B: int):
    if free_variables(phi):
        raise PreconditionFailed("sentence has free variables")
    big = [x for x in set(p.diagram.domain) | labels_of(phi) if not 1 <= x <= B]
    if big:
        raise BoundExceeded(f"labels {sorted(big)} lie outside 1..{B}")


def forces(p: Condition, phi: Sentence, B: int, s: int) -> str:
    """Forces, ForcesNegation or Neither, relative to the bounds (B, s)."""
    _check_bounds(p, phi, B)
    f = _forcer(B, s, p.variety, p.order_bound)
    st = _state(p.diagram)
    if f.forces(st, phi):
        return FORCES
    if f.forces(st, Not(phi)):
        return FORCES_NEGATION
    return NEITHER


def decides(p: Condition, phi: Sentence, B: int, s: int) -> bool:
    return forces(p, phi, B, s) != NEITHER


def holds_in(G, assignment: dict, phi: Sentence) -> bool:
    """Truth of a sentence in a group under a label-to-element assignment.

    Quantifiers range over every element; labels outside the assignment make
    atoms mentioning them false.
    """

    def val(t, env):
        return env.get(t) if isinstance(t, str) else assignment.get(t)

    def ev(phi, env):
        if isinstance(phi, Mul):
            a, b, c = (val(t, env) for t in _terms(phi))
            return None not in (a, b, c) and int(G.table[a, b]) == c
        if isinstance(phi, Eq):
            if phi.left == phi.right:
                return True
            a, b = val(phi.left, env), val(phi.right, env)
            return a is not None and a == b
        if isinstance(phi, Not):
            return not ev(phi.body, env)
        if isinstance(phi, Or):
            return ev(phi.left, env) or ev(phi.right, env)
        return any(ev(phi.body, {**env, phi.var: g}) for g in range(G.order))

    return ev(phi, {})


# ---------------------------------------------------------------------------
# generic checks


@dataclass(frozen=True)
class GenericEntry:
    sentence: str
    success: bool
    verdict: str
    condition: tuple  # cells (a, b, c) of the deciding p, empty on failure


@dataclass(frozen=True)
class GenericReport:
    entries: tuple
    B: int
    s: int

    @property
    def ok(self) -> bool:
        return all(e.success for e in self.entries)

    def to_dict(self) -> dict:
        return {
            "B": self.B,
            "s": self.s,
            "ok": self.ok,
            "entries": [
                {"sentence": e.sentence, "success": e.success, "verdict": e.verdict, "condition": [list(c) for c in e.condition]}
                for e in self.entries
            ],
        }


def generic_check(E: EnumeratedApprox, sentences, B: int, s: int, V: VarietySpec = GROUPS, order_bound: int | None = None) -> GenericReport:
    """For each sentence, a subset of E's diagram on {1..B} deciding it at the bounds."""
    if E.kind != "group":
        raise PreconditionFailed("generic checks run on groups")
    missing = [x for x in range(1, B + 1) if x not in E.index]
    if missing:
        raise PreconditionFailed(f"approximation lacks labels {missing}")
    bound = order_bound or max(B, E.algebra.order)
    cells = []
    for a in range(1, B + 1):
        for b in range(1, B + 1):
            c = E.value("mul", a, b)
            if c <= B:
                cells.append((a, b, c))
    f = _forcer(B, s, V, bound)
    entries = []
    for phi in sentences:
        if isinstance(phi, str):
            phi = parse_sentence(phi)
        big = [x for x in labels_of(phi) if not 1 <= x <= B]
        if big:
            raise BoundExceeded(f"labels {sorted(big)} lie outside 1..{B}")
        entries.append(_decide_from(f, cells, phi, s))
    return GenericReport(tuple(entries), B, s)


def _decide_from(f: _Forcer, cells, phi, s) -> GenericEntry:
    text = format_sentence(phi)
    for k in range(0, s + 1):
        for sub in itertools.combinations(cells, k):
            dom = frozenset({1} | {x for c in sub for x in c})
            st = (dom, frozenset(("mul", (a, b), c) for a, b, c in sub))
            if f.forces(st, phi):
                return GenericEntry(text, True, FORCES, sub)
            if f.forces(st, Not(phi)):
                return GenericEntry(text, True, FORCES_NEGATION, sub)
    return GenericEntry(text, False, NEITHER, ())


# ---------------------------------------------------------------------------
# the extension game

Strategy = Callable[[Diagram], Diagram]


def pass_strategy(D: Diagram) -> Diagram:
    return D


def fresh_label_strategy(D: Diagram) -> Diagram:
    return D.with_labels([max(D.domain) + 1])


def smallest_completion_strategy(V: VarietySpec, order_bound: int) -> Strategy:
    """Replace the diagram by the full table of its first completion."""

    def move(D: Diagram) -> Diagram:
        comps = complete_within(D, V, order_bound)
        if not comps:
            return D
        return comps[0].approx().diagram()

    return move


def extension_game(
    builder: Strategy,
    challenger: Strategy,
    rounds: int,
    V: VarietySpec = GROUPS,
    start: Diagram | None = None,
    order_bound: int | None = None,
):
    """Challenger moves on odd rounds, builder on even ones; returns (chain, limit)."""
    if order_bound is None:
        order_bound = 16 if V.abelian else LIBRARY_MAX_ORDER
    chain = [start if start is not None else Diagram.group({1})]
    for r in range(1, rounds + 1):
        player = challenger if r % 2 else builder
        nxt = player(chain[-1])
        if not isinstance(nxt, Diagram) or nxt.kind != chain[-1].kind:
            raise StrategyViolation(f"round {r}: move is not a diagram of the same kind")
        if not extends(chain[-1], nxt):
            raise StrategyViolation(f"round {r}: move does not extend the previous diagram")
        if not _has_completion(nxt, V, order_bound):
            raise StrategyViolation(f"round {r}: move has no completion in {V.name} of order <= {order_bound}")
        chain.append(nxt)
    last = chain[-1]
    limit = None
    if last.is_full():
        from .completion import full_table_group

        G, dom = full_table_group(last)
        limit = EnumeratedApprox(G, dom)
    return chain, limit
