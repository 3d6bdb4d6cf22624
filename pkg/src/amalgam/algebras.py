"""Finite semigroups and rings, and a uniform view of operation tables.

Every finite algebra exposes ``kind``, ``order``, ``operations()`` (op name to
numpy table; binary ops are ``n x n``, unary ops length ``n``) and
``constants()`` (constant name to element index).
"""

from __future__ import annotations

import numpy as np

from .groups import FiniteGroup

ARITY = {"mul": 2, "add": 2, "inv": 1, "neg": 1}
KIND_OPS = {"group": ("mul", "inv"), "semigroup": ("mul",), "ring": ("add", "neg", "mul")}
KIND_CONSTANTS = {"group": ("unit",), "semigroup": (), "ring": ("zero",)}


class FiniteSemigroup:
    kind = "semigroup"

    def __init__(self, table, *, validate: bool = True):
        t = np.array(table, dtype=np.int64)
        if t.ndim != 2 or t.shape[0] != t.shape[1] or t.shape[0] == 0:
            raise ValueError("semigroup table must be a non-empty square")
        if t.min() < 0 or t.max() >= t.shape[0]:
            raise ValueError("table entry out of range")
        t.setflags(write=False)
        self.table = t
        self.order = t.shape[0]
        if validate and not self.is_associative():
            raise ValueError("table is not associative")

    def is_associative(self) -> bool:
        t = self.table
        ar = np.arange(self.order)
        left = t[t[:, :, None], ar[None, None, :]]
        right = t[ar[:, None, None], t[None, :, :]]
        return bool(np.array_equal(left, right))

    def operations(self):
        return {"mul": self.table}

    def constants(self):
        return {}

    def __eq__(self, other):
        return isinstance(other, FiniteSemigroup) and np.array_equal(self.table, other.table)

    def __hash__(self):
        return hash(self.table.tobytes())

    def __repr__(self):
        return f"<FiniteSemigroup order={self.order}>"


class FiniteRing:
    """Associative ring without unit: additive abelian group plus multiplication."""

    kind = "ring"

    def __init__(self, add, mul, zero: int = 0, *, validate: bool = True):
        self.add = np.array(add, dtype=np.int64)
        self.mul = np.array(mul, dtype=np.int64)
        self.zero = int(zero)
        self.order = self.add.shape[0]
        self.neg = np.argmax(self.add == self.zero, axis=1)
        for a in (self.add, self.mul, self.neg):
            a.setflags(write=False)
        if validate:
            problem = self.axiom_violation()
            if problem:
                raise ValueError(problem)

    def axiom_violation(self) -> str | None:
        a, m, n, z = self.add, self.mul, self.order, self.zero
        ar = np.arange(n)
        try:
            FiniteGroup(a, z)
        except Exception as exc:  # additive group axioms
            return f"additive structure: {exc}"
        if not np.array_equal(a, a.T):
            return "addition not commutative"
        if not FiniteSemigroup(m, validate=False).is_associative():
            return "multiplication not associative"
        # x*(y+z) = x*y + x*z and (y+z)*x = y*x + z*x
        lhs = m[ar[:, None, None], a[None, :, :]]
        rhs = a[m[:, :, None], m[:, None, :]]
        if not np.array_equal(lhs, rhs):
            return "left distributivity fails"
        lhs = m[a[:, :, None], ar[None, None, :]]
        rhs = a[m[:, None, :], m[None, :, :]]
        if not np.array_equal(lhs, rhs):
            return "right distributivity fails"
        return None

    def operations(self):
        return {"add": self.add, "neg": self.neg, "mul": self.mul}

    def constants(self):
        return {"zero": self.zero}

    def __eq__(self, other):
        return (
            isinstance(other, FiniteRing)
            and self.zero == other.zero
            and np.array_equal(self.add, other.add)
            and np.array_equal(self.mul, other.mul)
        )

    def __hash__(self):
        return hash((self.add.tobytes(), self.mul.tobytes()))

    def __repr__(self):
        return f"<FiniteRing order={self.order}>"


def operations(A) -> dict:
    if isinstance(A, FiniteGroup):
        return {"mul": A.table, "inv": A.inverse}
    return A.operations()


def constants(A) -> dict:
    if isinstance(A, FiniteGroup):
        return {"unit": A.unit}
    return A.constants()


def kind_of(A) -> str:
    return "group" if isinstance(A, FiniteGroup) else A.kind
