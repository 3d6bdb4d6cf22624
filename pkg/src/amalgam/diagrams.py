"""Finite partial algebras (diagrams), the extension order, and related operations.

Labels are natural numbers. Distinct labels always denote distinct elements,
so inequations never appear explicitly. A cell is ``(op, args, value)``, e.g.
``("mul", (2, 3), 4)`` for ``2*3=4`` or ``("inv", (2,), 2)`` for ``2^-1=2``.
"""

from __future__ import annotations

import itertools
import json
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .algebras import ARITY, KIND_CONSTANTS, KIND_OPS, constants, kind_of, operations
from .errors import ConstantMoved, InsufficientDomain, KindMismatch, LabelMissing, MalformedDiagram

KINDS = ("group", "semigroup", "ring")
DEFAULT_CONSTANTS = {"group": {"unit": 1}, "semigroup": {}, "ring": {"zero": 0}}


class Diagram:
    """An immutable finite partial algebra in canonical form.

    ``marked`` optionally records a distinguished generating tuple; it is
    metadata and does not take part in equality.
    """

    __slots__ = ("kind", "domain", "cells", "constants", "marked", "__dict__")

    def __init__(self, kind: str, domain: Iterable[int], cells: Iterable = (), constants: Mapping | None = None, marked: Iterable[int] = ()):
        if kind not in KINDS:
            raise MalformedDiagram(f"unknown kind {kind!r}")
        consts = dict(DEFAULT_CONSTANTS[kind] if constants is None else constants)
        if set(consts) != set(KIND_CONSTANTS[kind]):
            raise MalformedDiagram(f"{kind} diagrams carry constants {KIND_CONSTANTS[kind]}")
        dom = sorted(set(int(x) for x in domain) | set(consts.values()))
        if any(x < 0 for x in dom):
            raise MalformedDiagram("labels are natural numbers")
        domset = set(dom)
        norm = set()
        for cell in cells:
            op, args, value = cell
            if op not in KIND_OPS[kind]:
                raise MalformedDiagram(f"operation {op!r} not allowed in {kind} diagrams")
            args = tuple(int(a) for a in args)
            if len(args) != ARITY[op]:
                raise MalformedDiagram(f"{op} takes {ARITY[op]} arguments")
            value = int(value)
            for lab in args + (value,):
                if lab not in domset:
                    raise MalformedDiagram(f"label {lab} in cell {_fmt_cell((op, args, value))} is outside the domain")
            norm.add((op, args, value))
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "domain", tuple(dom))
        object.__setattr__(self, "cells", tuple(sorted(norm, key=_cell_key)))
        object.__setattr__(self, "constants", tuple(sorted(consts.items())))
        marked = tuple(int(x) for x in marked)
        if any(m not in domset for m in marked):
            raise MalformedDiagram("marked labels must lie in the domain")
        object.__setattr__(self, "marked", marked)

    def __setattr__(self, name, value):
        if name in self.__slots__[:-1]:
            raise AttributeError("Diagram is immutable")
        super().__setattr__(name, value)

    # -- convenience -------------------------------------------------------
    @classmethod
    def group(cls, domain, mul=None, inv=None, unit: int = 1, marked=()):
        cells = [("mul", k, v) for k, v in (mul or {}).items()]
        cells += [("inv", (k,), v) for k, v in (inv or {}).items()]
        return cls("group", domain, cells, {"unit": unit}, marked)

    @classmethod
    def semigroup(cls, domain, mul=None, marked=()):
        return cls("semigroup", domain, [("mul", k, v) for k, v in (mul or {}).items()], {}, marked)

    @classmethod
    def ring(cls, domain, add=None, mul=None, neg=None, zero: int = 0, marked=()):
        cells = [("add", k, v) for k, v in (add or {}).items()]
        cells += [("mul", k, v) for k, v in (mul or {}).items()]
        cells += [("neg", (k,), v) for k, v in (neg or {}).items()]
        return cls("ring", domain, cells, {"zero": zero}, marked)

    @property
    def const_map(self) -> dict:
        return dict(self.constants)

    @property
    def unit(self):
        return self.const_map.get("unit")

    @property
    def zero(self):
        return self.const_map.get("zero")

    @cached_property
    def tables(self) -> dict:
        """``{op: {args: value}}``; on a double-valued cell the first canonical value wins."""
        out = {op: {} for op in KIND_OPS[self.kind]}
        for op, args, value in self.cells:
            out[op].setdefault(args, value)
        return out

    def value(self, op, *args):
        return self.tables[op].get(tuple(args))

    def with_cells(self, cells, domain=()) -> "Diagram":
        return Diagram(self.kind, set(self.domain) | set(domain), set(self.cells) | set(cells), self.const_map, self.marked)

    def with_labels(self, labels) -> "Diagram":
        return Diagram(self.kind, set(self.domain) | set(labels), self.cells, self.const_map, self.marked)

    def is_full(self) -> bool:
        """Every operation is defined on every tuple of domain labels."""
        n = len(self.domain)
        return all(len(self.tables[op]) == n ** ARITY[op] for op in KIND_OPS[self.kind])

    # -- identity ----------------------------------------------------------
    def _key(self):
        return (self.kind, self.domain, self.cells, self.constants)

    def __eq__(self, other):
        return isinstance(other, Diagram) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return f"Diagram({self.kind}, domain={list(self.domain)}, cells={len(self.cells)})"

    # -- serialisation -----------------------------------------------------
    def to_text(self) -> str:
        lines = [f"kind: {self.kind}", "domain: [" + ",".join(map(str, self.domain)) + "]"]
        for name, lab in self.constants:
            lines.append(f"{name}: {lab}")
        if self.marked:
            lines.append("marked: [" + ",".join(map(str, self.marked)) + "]")
        lines += [_fmt_cell(c) for c in self.cells]
        return "\n".join(lines) + "\n"

    def to_json(self) -> dict:
        return {
            "kind": self.kind,
            "domain": list(self.domain),
            "constants": dict(self.constants),
            "cells": [[op, list(args), v] for op, args, v in self.cells],
            "marked": list(self.marked),
        }

    @classmethod
    def from_json(cls, data) -> "Diagram":
        if isinstance(data, str):
            data = json.loads(data)
        return cls(
            data["kind"],
            data["domain"],
            [(op, tuple(args), v) for op, args, v in data.get("cells", [])],
            data.get("constants"),
            data.get("marked", ()),
        )


_OP_ORDER = {"mul": 0, "inv": 1, "add": 2, "neg": 3}


def _cell_key(cell):
    op, args, value = cell
    return (_OP_ORDER[op], args, value)


def _fmt_cell(cell) -> str:
    op, args, v = cell
    if op == "mul":
        return f"mul: {args[0]}*{args[1]}={v}"
    if op == "add":
        return f"add: {args[0]}+{args[1]}={v}"
    if op == "inv":
        return f"inv: {args[0]}^-1={v}"
    return f"neg: -{args[0]}={v}"


_CELL_RE = {
    "mul": re.compile(r"(\d+)\s*\*\s*(\d+)\s*=\s*(\d+)"),
    "add": re.compile(r"(\d+)\s*\+\s*(\d+)\s*=\s*(\d+)"),
    "inv": re.compile(r"(\d+)\s*\^\s*-1\s*=\s*(\d+)"),
    "neg": re.compile(r"-\s*(\d+)\s*=\s*(\d+)"),
}


def parse_diagram(text: str) -> Diagram:
    """Read the line format (``kind:``, ``domain:``, cells) or its JSON rendering."""
    stripped = text.strip()
    if stripped.startswith("{"):
        return Diagram.from_json(stripped)
    kind = None
    domain = None
    consts = {}
    marked = ()
    cells = []
    for n, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if ":" not in line:
            raise MalformedDiagram(f"line {n}: expected 'key: value'")
        key, rest = (s.strip() for s in line.split(":", 1))
        if key == "kind":
            kind = rest
        elif key in ("domain", "marked"):
            body = rest.strip("[] ")
            labels = [int(x) for x in body.split(",") if x.strip()]
            if key == "domain":
                domain = labels
            else:
                marked = labels
        elif key in ("unit", "zero"):
            consts[key] = int(rest)
        elif key in _CELL_RE:
            m = _CELL_RE[key].fullmatch(rest)
            if not m:
                raise MalformedDiagram(f"line {n}: cannot parse {key} cell {rest!r}")
            nums = [int(x) for x in m.groups()]
            cells.append((key, tuple(nums[:-1]), nums[-1]))
        else:
            raise MalformedDiagram(f"line {n}: unknown key {key!r}")
    if kind is None or domain is None:
        raise MalformedDiagram("diagram needs 'kind:' and 'domain:' lines")
    if kind not in KINDS:
        raise MalformedDiagram(f"unknown kind {kind!r}")
    if not consts:
        consts = None
    return Diagram(kind, domain, cells, consts, marked)


# ---------------------------------------------------------------------------
# local consistency


@dataclass(frozen=True)
class ConsistencyReport:
    ok: bool
    violation: str | None = None
    cells: tuple = ()

    def __bool__(self):
        return self.ok


def check_partial_consistency(D: Diagram) -> ConsistencyReport:
    """Check every law instance whose operands are all defined in ``D``."""
    for check in _CHECKS[D.kind]:
        bad = check(D)
        if bad is not None:
            message, cells = bad
            return ConsistencyReport(False, message, tuple(cells))
    return ConsistencyReport(True)


def _double_valued(D):
    seen = {}
    for op, args, v in D.cells:
        if (op, args) in seen and seen[(op, args)] != v:
            return "double-valued cell", [(op, args, seen[(op, args)]), (op, args, v)]
        seen[(op, args)] = v
    return None


def _assoc(op):
    def check(D):
        t = D.tables[op]
        for (a, b), ab in t.items():
            for (b2, c), bc in t.items():
                if b2 != b:
                    continue
                left = t.get((ab, c))
                right = t.get((a, bc))
                if left is not None and right is not None and left != right:
                    return f"associativity of {op}", [(op, (a, b), ab), (op, (b, c), bc), (op, (ab, c), left), (op, (a, bc), right)]
        return None

    return check


def _unit_law(op, unit_name, unary):
    def check(D):
        e = D.const_map[unit_name]
        t = D.tables[op]
        for (a, b), v in t.items():
            if a == e and v != b:
                return f"unit law {op}({e},{b})", [(op, (a, b), v)]
            if b == e and v != a:
                return f"unit law {op}({a},{e})", [(op, (a, b), v)]
        u = D.tables[unary]
        if (e,) in u and u[(e,)] != e:
            return "inverse of the identity", [(unary, (e,), u[(e,)])]
        return None

    return check


def _cancellation(op):
    def check(D):
        t = D.tables[op]
        rows, cols = {}, {}
        for (a, b), v in t.items():
            if (a, v) in rows and rows[(a, v)] != b:
                return f"left cancellation for {op}", [(op, (a, rows[(a, v)]), v), (op, (a, b), v)]
            rows[(a, v)] = b
            if (b, v) in cols and cols[(b, v)] != a:
                return f"right cancellation for {op}", [(op, (cols[(b, v)], b), v), (op, (a, b), v)]
            cols[(b, v)] = a
        return None

    return check


def _inverse_law(op, unary, unit_name):
    def check(D):
        e = D.const_map[unit_name]
        t, u = D.tables[op], D.tables[unary]
        for (a,), b in u.items():
            for args in ((a, b), (b, a)):
                if args in t and t[args] != e:
                    return "inverse law", [(unary, (a,), b), (op, args, t[args])]
            if (b,) in u and u[(b,)] != a:
                return "inverse is an involution", [(unary, (a,), b), (unary, (b,), u[(b,)])]
        for (a, b), v in t.items():
            if v != e:
                continue
            if (a,) in u and u[(a,)] != b:
                return "inverse law", [(op, (a, b), e), (unary, (a,), u[(a,)])]
            if (b,) in u and u[(b,)] != a:
                return "inverse law", [(op, (a, b), e), (unary, (b,), u[(b,)])]
            if (b, a) in t and t[(b, a)] != e:
                return "one-sided inverse", [(op, (a, b), e), (op, (b, a), t[(b, a)])]
        seen = {}
        for (a,), b in u.items():
            if b in seen:
                return "inverse not injective", [(unary, (seen[b],), b), (unary, (a,), b)]
            seen[b] = a
        return None

    return check


def _commutative(op):
    def check(D):
        t = D.tables[op]
        for (a, b), v in t.items():
            w = t.get((b, a))
            if w is not None and w != v:
                return f"commutativity of {op}", [(op, (a, b), v), (op, (b, a), w)]
        return None

    return check


def _ring_zero_mul(D):
    z = D.zero
    for (a, b), v in D.tables["mul"].items():
        if (a == z or b == z) and v != z:
            return "zero annihilates", [("mul", (a, b), v)]
    return None


def _distributive(D):
    add, mul = D.tables["add"], D.tables["mul"]
    for (b, c), s in add.items():
        for a in D.domain:
            # a*(b+c) = a*b + a*c
            lhs = mul.get((a, s))
            ab, ac = mul.get((a, b)), mul.get((a, c))
            if lhs is not None and ab is not None and ac is not None:
                rhs = add.get((ab, ac))
                if rhs is not None and rhs != lhs:
                    return "left distributivity", [("add", (b, c), s), ("mul", (a, s), lhs), ("mul", (a, b), ab), ("mul", (a, c), ac), ("add", (ab, ac), rhs)]
            lhs = mul.get((s, a))
            ba, ca = mul.get((b, a)), mul.get((c, a))
            if lhs is not None and ba is not None and ca is not None:
                rhs = add.get((ba, ca))
                if rhs is not None and rhs != lhs:
                    return "right distributivity", [("add", (b, c), s), ("mul", (s, a), lhs), ("mul", (b, a), ba), ("mul", (c, a), ca), ("add", (ba, ca), rhs)]
    return None


_CHECKS = {
    "group": [_double_valued, _unit_law("mul", "unit", "inv"), _cancellation("mul"), _inverse_law("mul", "inv", "unit"), _assoc("mul")],
    "semigroup": [_double_valued, _assoc("mul")],
    "ring": [
        _double_valued,
        _unit_law("add", "zero", "neg"),
        _cancellation("add"),
        _inverse_law("add", "neg", "zero"),
        _commutative("add"),
        _assoc("add"),
        _assoc("mul"),
        _ring_zero_mul,
        _distributive,
    ],
}


# ---------------------------------------------------------------------------
# extension order and relabelling


def extends(D: Diagram, D2: Diagram) -> bool:
    """True iff ``D2`` extends ``D`` (``D`` is a sub-diagram of ``D2``)."""
    if D.kind != D2.kind:
        raise KindMismatch(f"{D.kind} vs {D2.kind}")
    if D.constants != D2.constants:
        return False
    if not set(D.domain) <= set(D2.domain):
        return False
    tables = D2.tables
    return all(tables[op].get(args) == v for op, args, v in D.cells)


def relabel(D: Diagram, alpha) -> Diagram:
    """Substitute labels via ``alpha`` (a mapping; labels it omits are fixed)."""
    get = alpha.get if isinstance(alpha, Mapping) else alpha
    amap = {x: (get(x, x) if isinstance(alpha, Mapping) else get(x)) for x in D.domain}
    for name, lab in D.constants:
        if amap[lab] != lab:
            raise ConstantMoved(f"alpha moves the constant {name}={lab}")
    if len(set(amap.values())) != len(amap):
        raise MalformedDiagram("alpha is not injective on the domain")
    cells = [(op, tuple(amap[a] for a in args), amap[v]) for op, args, v in D.cells]
    return Diagram(D.kind, amap.values(), cells, D.const_map, [amap[m] for m in D.marked])


# ---------------------------------------------------------------------------
# enumerated approximations


class EnumeratedApprox:
    """A finite algebra together with an injective labelling of its elements."""

    def __init__(self, algebra, labels: Iterable[int]):
        labels = tuple(int(x) for x in labels)
        if len(labels) != algebra.order:
            raise ValueError("one label per element is required")
        if len(set(labels)) != len(labels):
            raise ValueError("labelling must be injective")
        kind = kind_of(algebra)
        for name, idx in constants(algebra).items():
            want = DEFAULT_CONSTANTS[kind].get(name)
            if want is not None and labels[idx] != want:
                raise ValueError(f"the {name} must carry label {want}")
        self.algebra = algebra
        self.labels = labels
        self.kind = kind
        self.index = {lab: i for i, lab in enumerate(labels)}

    def value(self, op, *labs) -> int:
        try:
            idx = [self.index[x] for x in labs]
        except KeyError as exc:
            raise LabelMissing(f"label {exc.args[0]} is not in the approximation") from None
        return self.labels[int(operations(self.algebra)[op][tuple(idx)])]

    def diagram(self, marked=()) -> Diagram:
        return diagram_of(self.algebra, marked, labels=self.labels)

    def __repr__(self):
        return f"EnumeratedApprox({self.algebra!r}, labels={list(self.labels)})"


def default_labels(algebra) -> tuple[int, ...]:
    """Constants get their designated labels, the rest count upward in index order."""
    kind = kind_of(algebra)
    consts = constants(algebra)
    labels = [None] * algebra.order
    used = set()
    for name, idx in consts.items():
        labels[idx] = DEFAULT_CONSTANTS[kind][name]
        used.add(labels[idx])
    nxt = 1 if kind != "ring" else 1
    for i in range(algebra.order):
        if labels[i] is None:
            while nxt in used:
                nxt += 1
            labels[i] = nxt
            used.add(nxt)
    return tuple(labels)


def diagram_of(F, tuple_=(), labels=None) -> Diagram:
    """The full operation tables of ``F`` as a diagram; ``tuple_`` holds element indices."""
    labels = tuple(labels) if labels is not None else default_labels(F)
    kind = kind_of(F)
    cells = []
    for op, table in operations(F).items():
        t = np.asarray(table)
        if t.ndim == 2:
            n = t.shape[0]
            cells += [(op, (labels[a], labels[b]), labels[int(t[a, b])]) for a in range(n) for b in range(n)]
        else:
            cells += [(op, (labels[a],), labels[int(t[a])]) for a in range(len(t))]
    consts = {name: labels[idx] for name, idx in constants(F).items()}
    return Diagram(kind, labels, cells, consts, [labels[i] for i in tuple_])


def satisfies(E: EnumeratedApprox, D: Diagram) -> bool:
    """Membership of ``E`` in the basic clopen set of ``D``."""
    if E.kind != D.kind:
        raise KindMismatch(f"{E.kind} vs {D.kind}")
    for lab in D.domain:
        if lab not in E.index:
            raise LabelMissing(f"label {lab} is not in the approximation")
    consts = constants(E.algebra)
    for name, lab in D.constants:
        if E.labels[consts[name]] != lab:
            return False
    return all(E.value(op, *args) == v for op, args, v in D.cells)


def default_tuple_enum(labels: Iterable[int], max_len: int = 3) -> list[tuple]:
    """All tuples of length 1..max_len over ``labels`` in shortlex order."""
    labs = sorted(labels)
    out = []
    for k in range(1, max_len + 1):
        out.extend(itertools.product(labs, repeat=k))
    return out


def logic_metric(E1: EnumeratedApprox, E2: EnumeratedApprox, tuple_enum=None, cutoff: int = 16) -> Fraction:
    """Sum of ``2^-n`` over the first ``cutoff`` tuples on which the operations disagree."""
    if E1.kind != E2.kind:
        raise KindMismatch(f"{E1.kind} vs {E2.kind}")
    if tuple_enum is None:
        tuple_enum = default_tuple_enum(set(E1.labels) & set(E2.labels))
    ops = KIND_OPS[E1.kind]
    total = Fraction(0)
    for n, tup in enumerate(itertools.islice(tuple_enum, cutoff)):
        for lab in tup:
            if lab not in E1.index or lab not in E2.index:
                raise InsufficientDomain(f"label {lab} of tuple #{n} is undefined")
        if any(E1.value(op, *tup) != E2.value(op, *tup) for op in ops if ARITY[op] == len(tup)):
            total += Fraction(1, 2**n)
    return total
