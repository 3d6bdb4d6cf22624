"""Group varieties given by laws, and group-word utilities.

A word is a tuple of ``(variable, sign)`` pairs with ``sign`` in ``{1, -1}``;
variables are small non-negative integers.
"""

from __future__ import annotations

import itertools
import re
from dataclasses import dataclass, field

import numpy as np

from .groups import FiniteGroup


def commutator_word(a, b):
    """``[a, b] = a^-1 b^-1 a b`` for words ``a`` and ``b``."""
    return invert_word(a) + invert_word(b) + tuple(a) + tuple(b)


def invert_word(w):
    return tuple((v, -s) for v, s in reversed(w))


def left_normed_commutator(weight: int):
    """``[[x0, x1], x2], ...`` of the given weight (variables 0..weight-1)."""
    w = ((0, 1),)
    for v in range(1, weight):
        w = commutator_word(w, ((v, 1),))
    return w


def reduce_word(w):
    out = []
    for letter in w:
        if out and out[-1][0] == letter[0] and out[-1][1] == -letter[1]:
            out.pop()
        else:
            out.append(letter)
    return tuple(out)


def word_variables(w) -> int:
    return 1 + max((v for v, _ in w), default=-1)


def evaluate_word(G: FiniteGroup, w, values) -> int:
    x = G.unit
    for v, s in w:
        g = values[v]
        x = int(G.table[x, g if s > 0 else G.inverse[g]])
    return x


def evaluate_word_all(G: FiniteGroup, w, nvars: int) -> np.ndarray:
    """Value of ``w`` at every substitution in ``range(n) ** nvars`` (flattened)."""
    n = G.order
    grids = np.meshgrid(*([np.arange(n)] * nvars), indexing="ij") if nvars else []
    cols = [g.ravel() for g in grids]
    size = n**nvars
    acc = np.full(size, G.unit, dtype=np.int64)
    for v, s in w:
        g = cols[v] if s > 0 else G.inverse[cols[v]]
        acc = G.table[acc, g]
    return acc


def format_word(w, names=None) -> str:
    if not w:
        return "1"
    parts = []
    for v, s in w:
        name = names[v] if names else f"x{v}"
        parts.append(name if s > 0 else f"{name}^-1")
    return "*".join(parts)


def parse_word(text: str, names: dict[str, int]):
    """Parse ``a*b^-1*a^2`` style words; ``1`` is the empty word."""
    text = text.strip()
    if text in ("", "1"):
        return ()
    out = []
    for tok in text.split("*"):
        tok = tok.strip()
        m = re.fullmatch(r"([A-Za-z_][\w']*)(?:\^(-?\d+))?", tok)
        if not m:
            raise ValueError(f"bad word token {tok!r}")
        name, exp = m.group(1), int(m.group(2) or 1)
        if name not in names:
            raise ValueError(f"unknown generator {name!r}")
        v = names[name]
        out.extend([(v, 1 if exp > 0 else -1)] * abs(exp))
    return tuple(out)


def enumerate_words(k: int, max_len: int):
    """Freely reduced words over k letters of length <= max_len, shortlex order."""
    letters = [(v, s) for v in range(k) for s in (1, -1)]
    words = [()]
    frontier = [()]
    for _ in range(max_len):
        nxt = []
        for w in frontier:
            for l in letters:
                if w and w[-1][0] == l[0] and w[-1][1] == -l[1]:
                    continue
                nxt.append(w + (l,))
        words.extend(nxt)
        frontier = nxt
    return words


@dataclass(frozen=True)
class VarietySpec:
    """A variety of groups defined by laws ``w = 1``.

    ``abelian``, ``exponent`` and ``nil_class`` record the recognised shape of
    the laws so membership can be tested without enumerating substitutions.
    """

    name: str
    laws: tuple = ()
    abelian: bool = False
    exponent: int | None = None
    nil_class: int | None = None
    extra: tuple = field(default=(), compare=False)

    def holds_in(self, G: FiniteGroup) -> bool:
        if self.abelian and not G.is_abelian():
            return False
        if self.exponent is not None and self.exponent % G.exponent:
            return False
        if self.nil_class is not None:
            c = G.nilpotency_class
            if c is None or c > self.nil_class:
                return False
        return all(self._law_holds(G, w) for w in self.extra)

    def holds_exhaustively(self, G: FiniteGroup) -> bool:
        """Evaluate every law at every substitution (independent of :meth:`holds_in`)."""
        return all(self._law_holds(G, w) for w in self.laws)

    @staticmethod
    def _law_holds(G, w) -> bool:
        k = word_variables(w)
        if G.order**k > 5_000_000:
            raise ValueError("too many substitutions for exhaustive law check")
        return bool(np.all(evaluate_word_all(G, w, k) == G.unit))

    @property
    def p(self) -> int | None:
        return self.exponent

    def is_nil2_expp(self) -> bool:
        return (
            self.exponent is not None
            and self.nil_class is not None
            and self.nil_class <= 2
            and not self.abelian
            and _is_odd_prime(self.exponent)
        )


def _is_odd_prime(n: int) -> bool:
    return n > 2 and all(n % d for d in range(2, int(n**0.5) + 1))


GROUPS = VarietySpec("group")
ABEL = VarietySpec("abel", laws=(commutator_word(((0, 1),), ((1, 1),)),), abelian=True)


def exponent_variety(n: int) -> VarietySpec:
    return VarietySpec(f"exp{n}", laws=(((0, 1),) * n,), exponent=n)


def nilpotent_variety(c: int) -> VarietySpec:
    return VarietySpec(f"nil{c}", laws=(left_normed_commutator(c + 1),), nil_class=c)


def nil_exp_variety(c: int, p: int) -> VarietySpec:
    if c == 1:
        return VarietySpec(
            f"abel-exp{p}",
            laws=(commutator_word(((0, 1),), ((1, 1),)), ((0, 1),) * p),
            abelian=True,
            exponent=p,
        )
    return VarietySpec(
        f"nil{c}-exp{p}",
        laws=(left_normed_commutator(c + 1), ((0, 1),) * p),
        exponent=p,
        nil_class=c,
    )


def variety_from_name(name: str) -> VarietySpec:
    """Registry used by the CLI: ``group``, ``abel``, ``exp<n>``, ``nil<c>``, ``nil<c>-exp<p>``."""
    name = name.strip().lower()
    if name in ("group", "groups"):
        return GROUPS
    if name in ("abel", "abelian"):
        return ABEL
    m = re.fullmatch(r"abel-?exp(\d+)", name)
    if m:
        return nil_exp_variety(1, int(m.group(1)))
    m = re.fullmatch(r"exp(\d+)", name)
    if m:
        return exponent_variety(int(m.group(1)))
    m = re.fullmatch(r"nil(\d+)", name)
    if m:
        return nilpotent_variety(int(m.group(1)))
    m = re.fullmatch(r"nil(\d+)-?exp(\d+)", name) or re.fullmatch(r"(\d+)nil(\d+)", name)
    if m:
        return nil_exp_variety(int(m.group(1)), int(m.group(2)))
    raise ValueError(f"unknown variety {name!r}")
