"""Formula and signal tables: guarded consequents produced per block output.

A table is a sequence of ``(precondition, consequent)`` entries whose
preconditions together cover every situation. Consequents are formulas in
a :class:`FormulaTable` and signal expressions in a :class:`SignalTable`.

A formula table is *pointwise* when its formulas describe the block output
at the sample they are evaluated at, and *anchored* when they are meant to be
evaluated at time 0 and describe the output at the final sample.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import itertools

from ..stl.ast import (
    And, BinOp, Const, Eventually, FalseConst, Formula, Implies, Not, Predicate, TrueConst, conj,
    conj_all, disj, disj_all, neg,
)

DEFAULT_ENTRY_LIMIT = 4096
ENCODINGS = ("disjunctive", "implicative")


class TableSizeError(RuntimeError):
    pass


@dataclass(frozen=True)
class FormulaTable:
    entries: tuple[tuple[Formula, Formula], ...]
    anchored: bool = False

    def __len__(self) -> int:
        return len(self.entries)


@dataclass(frozen=True)
class SignalTable:
    entries: tuple[tuple[Formula, object], ...]

    def __len__(self) -> int:
        return len(self.entries)

    anchored = False


Table = FormulaTable | SignalTable


def single(consequent, formula: bool = True) -> Table:
    if formula:
        return FormulaTable(((TrueConst(), consequent),))
    return SignalTable(((TrueConst(), consequent),))


def _check(n: int, limit: int) -> None:
    if n > limit:
        raise TableSizeError(f"table would have {n} entries, above the limit of {limit}")


def combine(
    in1: Table,
    in2: Table,
    fn: Callable,
    result: type = FormulaTable,
    limit: int = DEFAULT_ENTRY_LIMIT,
) -> Table:
    """Cartesian product: preconditions conjoined, ``fn`` applied to consequents."""
    _check(len(in1) * len(in2), limit)
    entries = tuple(
        (conj(p1, p2), fn(c1, c2)) for p1, c1 in in1.entries for p2, c2 in in2.entries
    )
    if result is FormulaTable:
        return FormulaTable(entries, in1.anchored and in2.anchored)
    return SignalTable(entries)


def combine_binary(op: str, in1: Table, in2: Table, limit: int = DEFAULT_ENTRY_LIMIT) -> Table:
    """Apply a binary block operator entrywise over the product of two tables.

    Logical operators need formula tables, relational and arithmetic ones
    signal tables; coercion is the caller's job.
    """
    if op in ("and", "or"):
        _need(FormulaTable, in1, in2)
        return combine(in1, in2, conj if op == "and" else disj, FormulaTable, limit)
    if op in ("<", "<=", ">=", ">", "=="):
        _need(SignalTable, in1, in2)
        return combine(in1, in2, lambda a, b: Predicate(a, op, b), FormulaTable, limit)
    if op in ("+", "-", "*", "/"):
        _need(SignalTable, in1, in2)
        return combine(in1, in2, lambda a, b: BinOp(op, a, b), SignalTable, limit)
    raise ValueError(f"unknown binary operator {op!r}")


def _need(cls: type, *tables: Table) -> None:
    for t in tables:
        if not isinstance(t, cls):
            raise TypeError(f"expected a {cls.__name__}, got a {type(t).__name__}")


def map_consequents(t: Table, fn: Callable, result: type | None = None) -> Table:
    result = result or type(t)
    entries = tuple((p, fn(c)) for p, c in t.entries)
    if result is FormulaTable:
        return FormulaTable(entries, t.anchored)
    return SignalTable(entries)


def translate_switch(cond: FormulaTable, in1: Table, in3: Table, limit: int = DEFAULT_ENTRY_LIMIT) -> Table:
    """Switch output: ``in1`` where the condition holds, ``in3`` elsewhere.

    ``cond`` carries the already evaluated switch criterion as consequents.
    The result has ``len(cond) * (len(in1) + len(in3))`` entries.
    """
    _need(FormulaTable, cond)
    if type(in1) is not type(in3):
        raise TypeError("switch data inputs must be tables of the same kind")
    _check(len(cond) * (len(in1) + len(in3)), limit)
    entries = []
    for p, c in cond.entries:
        on, off = conj(p, c), conj(p, neg(c))
        entries += [(conj(on, q), x) for q, x in in1.entries]
        entries += [(conj(off, q), x) for q, x in in3.entries]
    if isinstance(in1, FormulaTable):
        return FormulaTable(tuple(entries), cond.anchored and in1.anchored and in3.anchored)
    return SignalTable(tuple(entries))


def s2f(t: SignalTable) -> FormulaTable:
    """Read a signal as a Boolean: true wherever it differs from zero."""
    _need(SignalTable, t)
    return FormulaTable(tuple((p, Not(Predicate(c, "==", Const(0.0)))) for p, c in t.entries))


def flatten_table(t: FormulaTable, encoding: str = "implicative") -> Formula:
    """Collapse a formula table into one formula.

    ``disjunctive`` gives ``OR_i (p_i and c_i)``; ``implicative`` gives
    ``AND_i (p_i => c_i)``. A lone entry guarded by ``true`` flattens to its
    consequent under both encodings.
    """
    _need(FormulaTable, t)
    if encoding not in ENCODINGS:
        raise ValueError(f"encoding must be one of {ENCODINGS}")
    if not t.entries:
        raise ValueError("cannot flatten an empty table")
    if len(t.entries) == 1 and isinstance(t.entries[0][0], TrueConst):
        return t.entries[0][1]
    if encoding == "disjunctive":
        return disj_all([conj(p, c) for p, c in t.entries])
    return conj_all([c if isinstance(p, TrueConst) else Implies(p, c) for p, c in t.entries])


def lift_to_end(t: FormulaTable, horizon: float) -> FormulaTable:
    """Turn a pointwise table into an anchored one by reading it at ``horizon``."""
    if t.anchored:
        return t
    return FormulaTable(tuple((at_time(p, horizon), at_time(c, horizon)) for p, c in t.entries), True)


def at_time(f: Formula, t: float) -> Formula:
    if isinstance(f, (TrueConst, FalseConst)):
        return f
    return Eventually(f, t, t)


def entry_set(t: Table) -> set:
    return set(t.entries)


def preconditions_cover(t: Table) -> bool:
    """Syntactic check that the preconditions are exhaustive.

    Recognises a lone ``true`` guard and tables whose guards enumerate all
    truth combinations of a set of atomic conditions.
    """
    pres = [p for p, _ in t.entries]
    if any(isinstance(p, TrueConst) for p in pres):
        return True
    literal_sets = [frozenset(_literals(p)) for p in pres]
    atoms = sorted({a for ls in literal_sets for a, _ in ls}, key=repr)
    if not atoms or len(atoms) > 12:
        return False
    for signs in itertools.product((True, False), repeat=len(atoms)):
        world = dict(zip(atoms, signs))
        if not any(all(world[a] == s for a, s in ls) for ls in literal_sets):
            return False
    return True


def _literals(p: Formula) -> list:
    out, stack = [], [p]
    while stack:
        node = stack.pop()
        if isinstance(node, And):
            stack += [node.left, node.right]
        elif isinstance(node, Not):
            out.append((node.child, False))
        elif not isinstance(node, TrueConst):
            out.append((node, True))
    return out
