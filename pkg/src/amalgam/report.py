"""Property reports with self-contained, replayable certificates.

A certificate lists group tables once and then a sequence of checks that refer
to them by position. Replaying a report rebuilds every object from its raw
data and re-runs the checks without any search.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .diagrams import Diagram, diagram_of, extends, relabel
from .errors import AmalgamError, CorruptReport
from .groups import FiniteGroup, Morphism
from .varieties import evaluate_word, variety_from_name

WITNESSED = "Witnessed"
COUNTEREXAMPLE = "CounterexampleAtBound"
UNKNOWN = "Unknown"
STATUSES = (WITNESSED, COUNTEREXAMPLE, UNKNOWN)
EXIT_CODES = {WITNESSED: 0, COUNTEREXAMPLE: 2, UNKNOWN: 3}


class Certificate:
    """Accumulates groups, morphisms and checks in a canonical order."""

    def __init__(self):
        self.groups: list[FiniteGroup] = []
        self._gidx: dict = {}
        self.morphisms: list[dict] = []
        self._midx: dict = {}
        self.checks: list[dict] = []

    def group(self, G: FiniteGroup) -> int:
        key = (G.unit, G.table.tobytes(), G.order)
        if key not in self._gidx:
            self._gidx[key] = len(self.groups)
            self.groups.append(G)
            self.checks.append({"check": "group", "group": self._gidx[key]})
        return self._gidx[key]

    def morphism(self, m: Morphism, injective: bool = True) -> int:
        s, t = self.group(m.source), self.group(m.target)
        key = (s, t, m.map.tobytes())
        if key not in self._midx:
            self._midx[key] = len(self.morphisms)
            self.morphisms.append({"source": s, "target": t, "map": [int(x) for x in m.map]})
            self.checks.append({"check": "morphism", "morphism": self._midx[key], "injective": injective})
        return self._midx[key]

    def add(self, check: str, **data) -> None:
        self.checks.append({"check": check, **data})

    def labeled(self, G: FiniteGroup, labels) -> dict:
        return {"group": self.group(G), "labels": [int(x) for x in labels]}

    def to_dict(self) -> dict:
        return {
            "groups": [{"unit": int(G.unit), "table": G.table.tolist()} for G in self.groups],
            "morphisms": self.morphisms,
            "checks": self.checks,
        }


@dataclass
class PropertyReport:
    property: str
    status: str
    bounds: dict
    summary: dict = field(default_factory=dict)
    certificate: Certificate | None = None

    def __post_init__(self):
        if self.status not in STATUSES:
            raise ValueError(f"unknown status {self.status}")

    @property
    def exit_code(self) -> int:
        return EXIT_CODES[self.status]

    @property
    def witnessed(self) -> bool:
        return self.status == WITNESSED

    def to_dict(self) -> dict:
        return {
            "property": self.property,
            "status": self.status,
            "bounds": self.bounds,
            "summary": self.summary,
            "replay": self.certificate.to_dict() if self.certificate else {"groups": [], "morphisms": [], "checks": []},
        }

    def to_json(self) -> str:
        return canonical_json(self.to_dict())


def canonical_json(data) -> str:
    return json.dumps(data, sort_keys=True, separators=(",", ":"), default=_plain) + "\n"


def _plain(x):
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (frozenset, set)):
        return sorted(x)
    if isinstance(x, np.ndarray):
        return x.tolist()
    raise TypeError(f"cannot serialise {type(x)}")


# ---------------------------------------------------------------------------
# replay


class _Replayer:
    def __init__(self, data: dict):
        try:
            rep = data["replay"]
            self.raw_groups = rep["groups"]
            self.raw_morphisms = rep["morphisms"]
            self.checks = rep["checks"]
        except (KeyError, TypeError) as exc:
            raise CorruptReport(f"missing field {exc}") from None
        self._groups: dict = {}
        self._morphisms: dict = {}

    def group(self, i: int) -> FiniteGroup:
        if i not in self._groups:
            g = self.raw_groups[i]
            self._groups[i] = FiniteGroup(g["table"], g["unit"])
        return self._groups[i]

    def morphism(self, i: int) -> Morphism:
        if i not in self._morphisms:
            m = self.raw_morphisms[i]
            self._morphisms[i] = Morphism(self.group(m["source"]), self.group(m["target"]), m["map"])
        return self._morphisms[i]

    def diagram(self, spec) -> Diagram:
        if "group" in spec:
            G = self.group(spec["group"])
            return diagram_of(G, (), labels=spec["labels"])
        return Diagram.from_json(spec)

    def run(self, chk: dict) -> str | None:
        kind = chk["check"]
        if kind == "group":
            self.group(chk["group"])
        elif kind == "morphism":
            m = self.morphism(chk["morphism"])
            if chk.get("injective") and not m.is_injective:
                return "morphism is not injective"
        elif kind == "commutes":
            # compose each path right to left and compare
            paths = []
            for path in chk["paths"]:
                maps = [self.morphism(i) for i in path]
                cur = maps[-1]
                for m in reversed(maps[:-1]):
                    cur = m.compose(cur)
                paths.append(cur.as_tuple())
            if any(p != paths[0] for p in paths[1:]):
                return "square does not commute"
        elif kind == "extends":
            small = self.diagram(chk["small"])
            if "alpha" in chk:
                alpha = {int(a): int(b) for a, b in chk["alpha"]}
                for x in chk.get("fixed", []):
                    if alpha.get(x, x) != x:
                        return f"relabelling moves fixed label {x}"
                small = relabel(small, alpha)
            if not extends(small, self.diagram(chk["big"])):
                return "extension fails"
        elif kind == "completion":
            D = self.diagram(chk["diagram"])
            G = self.group(chk["group"])
            asg = {int(a): int(b) for a, b in chk["assignment"]}
            if sorted(asg) != sorted(D.domain) or len(set(asg.values())) != len(asg):
                return "assignment is not an injection of the domain"
            if asg[D.unit] != G.unit:
                return "unit label not sent to the unit"
            for op, args, v in D.cells:
                got = G.table[asg[args[0]], asg[args[1]]] if op == "mul" else G.inverse[asg[args[0]]]
                if int(got) != asg[v]:
                    return f"cell {op}{args}={v} fails in the completion"
            if not variety_from_name(chk["variety"]).holds_exhaustively(G):
                return "completion violates the variety"
        elif kind == "word_separation":
            vals = []
            for side in ("a", "b"):
                G = self.group(chk[f"group_{side}"])
                pts = chk[f"tuple_{side}"]
                w1 = [tuple(x) for x in chk["w1"]]
                w2 = [tuple(x) for x in chk["w2"]]
                vals.append(evaluate_word(G, w1, pts) == evaluate_word(G, w2, pts))
            if vals[0] == vals[1]:
                return "word pair does not separate the completions"
        elif kind == "gamma_stable":
            base = self.morphism(chk["base"])  # G0 -> G1
            ext = self.morphism(chk["ext"])  # G1 -> C
            G1, C = base.target, ext.target
            through = ext.compose(base)
            for i in range(1, chk["levels"] + 1):
                if base.preimage(G1.gamma(i)) != through.preimage(C.gamma(i)):
                    return f"Gamma_{i} intersection differs"
        elif kind == "gamma_contains":
            base = self.morphism(chk["base"])
            if base.preimage(base.target.gamma(chk["level"])) != frozenset(range(base.source.order)):
                return "G0 is not inside the required Gamma term"
        elif kind == "base":
            G = self.group(chk["group"])
            if G.derived != G.center:
                return "derived subgroup differs from the centre"
        else:
            raise CorruptReport(f"unknown check {kind!r}")
        return None


def replay_report(data) -> list[str]:
    """Re-verify every certificate check; returns the list of failures."""
    if isinstance(data, str):
        try:
            data = json.loads(data)
        except json.JSONDecodeError as exc:
            raise CorruptReport(f"not JSON: {exc}") from None
    if data.get("status") not in STATUSES:
        raise CorruptReport("missing or unknown status")
    r = _Replayer(data)
    failures = []
    for n, chk in enumerate(r.checks):
        try:
            problem = r.run(chk)
        except CorruptReport:
            raise
        except (AmalgamError, ValueError, IndexError, KeyError, TypeError) as exc:
            problem = f"{type(exc).__name__}: {exc}"
        if problem:
            failures.append(f"check #{n} ({chk.get('check')}): {problem}")
    return failures
