"""Formula and signal-expression trees.

All nodes are frozen dataclasses, so structurally equal formulas compare and
hash equal. Connective nodes carry an optional semantics tag (``"max"`` or
``"add"``); ``None`` defers to the evaluator's default.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator, Optional, Union

INF = math.inf
RELATIONS = ("<", "<=", ">=", ">", "==")
SEM_TAGS = ("max", "add")


# Signal expressions --------------------------------------------------------


@dataclass(frozen=True)
class Const:
    value: float


@dataclass(frozen=True)
class Var:
    """Signal reference; ``shift`` reads the signal ``shift`` seconds later."""

    name: str
    shift: float = 0.0


@dataclass(frozen=True)
class BinOp:
    op: str  # one of + - * /
    left: "Expr"
    right: "Expr"


@dataclass(frozen=True)
class Neg:
    arg: "Expr"


@dataclass(frozen=True)
class Abs:
    arg: "Expr"


Expr = Union[Const, Var, BinOp, Neg, Abs]


def expr_signals(e: Expr) -> set[str]:
    if isinstance(e, Var):
        return {e.name}
    if isinstance(e, Const):
        return set()
    if isinstance(e, BinOp):
        return expr_signals(e.left) | expr_signals(e.right)
    return expr_signals(e.arg)


def const_value(e: Expr) -> Optional[float]:
    """Fold a signal-free expression to a number, or ``None``."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return None
    if isinstance(e, BinOp):
        lv, rv = const_value(e.left), const_value(e.right)
        if lv is None or rv is None:
            return None
        return apply_binop(e.op, lv, rv)
    v = const_value(e.arg)
    if v is None:
        return None
    return -v if isinstance(e, Neg) else abs(v)


def apply_binop(op: str, x: float, y: float) -> float:
    if op == "+":
        return x + y
    if op == "-":
        return x - y
    if op == "*":
        return x * y
    if op == "/":
        if y == 0:
            return math.nan
        return x / y
    raise ValueError(f"unknown arithmetic operator {op!r}")


def compare(op: str, x: float, y: float) -> bool:
    if op == "<":
        return x < y
    if op == "<=":
        return x <= y
    if op == ">=":
        return x >= y
    if op == ">":
        return x > y
    if op == "==":
        return x == y
    raise ValueError(f"unknown relation {op!r}")


# Formulas --------------------------------------------------------------------


@dataclass(frozen=True)
class Predicate:
    lhs: Expr
    op: str
    rhs: Expr

    def __post_init__(self):
        if self.op not in RELATIONS:
            raise ValueError(f"unknown relation {self.op!r}")


@dataclass(frozen=True)
class TrueConst:
    pass


@dataclass(frozen=True)
class FalseConst:
    pass


TRUE = TrueConst()
FALSE = FalseConst()


@dataclass(frozen=True)
class Not:
    child: "Formula"


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"
    sem: Optional[str] = None


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"
    sem: Optional[str] = None


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"
    sem: Optional[str] = None
    scale: Optional[float] = None


@dataclass(frozen=True)
class Scaled:
    """Robustness scaling ``child # factor``."""

    child: "Formula"
    factor: float


def _check_interval(a: float, b: float) -> None:
    if not (a >= 0 and b >= a):
        raise ValueError(f"malformed interval [{a}, {b}]")


@dataclass(frozen=True)
class Always:
    child: "Formula"
    a: float = 0.0
    b: float = INF
    sem: Optional[str] = None

    def __post_init__(self):
        _check_interval(self.a, self.b)


@dataclass(frozen=True)
class Eventually:
    child: "Formula"
    a: float = 0.0
    b: float = INF
    sem: Optional[str] = None

    def __post_init__(self):
        _check_interval(self.a, self.b)


@dataclass(frozen=True)
class Until:
    left: "Formula"
    right: "Formula"
    a: float = 0.0
    b: float = INF
    sem: Optional[str] = None

    def __post_init__(self):
        _check_interval(self.a, self.b)


Formula = Union[
    Predicate, TrueConst, FalseConst, Not, And, Or, Implies, Scaled, Always, Eventually, Until
]
TEMPORAL = (Always, Eventually, Until)
BINARY = (And, Or, Implies, Until)


def children(f: Formula) -> tuple:
    if isinstance(f, (Not, Scaled, Always, Eventually)):
        return (f.child,)
    if isinstance(f, BINARY):
        return (f.left, f.right)
    return ()


def walk(f: Formula) -> Iterator[Formula]:
    """Pre-order traversal without recursion (safe on very deep trees)."""
    stack = [f]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def predicates(f: Formula) -> list[Predicate]:
    return [n for n in walk(f) if isinstance(n, Predicate)]


def signals(f: Formula) -> set[str]:
    out: set[str] = set()
    for p in predicates(f):
        out |= expr_signals(p.lhs) | expr_signals(p.rhs)
    return out


def modal_depth(f: Formula) -> int:
    """Deepest nesting of temporal operators along any root-to-leaf path."""
    best = 0
    stack = [(f, 0)]
    while stack:
        node, d = stack.pop()
        if isinstance(node, TEMPORAL):
            d += 1
        best = max(best, d)
        stack.extend((c, d) for c in children(node))
    return best


def depth(f: Formula) -> int:
    """Height of the operator tree; atoms have depth 0."""
    best = 0
    stack = [(f, 0)]
    while stack:
        node, d = stack.pop()
        best = max(best, d)
        stack.extend((c, d + 1) for c in children(node))
    return best


def operator_count(f: Formula) -> int:
    return sum(1 for n in walk(f) if children(n))


# Smart constructors used by the translator --------------------------------


def conj(x: Formula, y: Formula, sem: Optional[str] = None) -> Formula:
    if isinstance(x, TrueConst):
        return y
    if isinstance(y, TrueConst):
        return x
    if isinstance(x, FalseConst) or isinstance(y, FalseConst):
        return FALSE
    return And(x, y, sem)


def disj(x: Formula, y: Formula, sem: Optional[str] = None) -> Formula:
    if isinstance(x, FalseConst):
        return y
    if isinstance(y, FalseConst):
        return x
    if isinstance(x, TrueConst) or isinstance(y, TrueConst):
        return TRUE
    return Or(x, y, sem)


def neg(x: Formula) -> Formula:
    if isinstance(x, TrueConst):
        return FALSE
    if isinstance(x, FalseConst):
        return TRUE
    if isinstance(x, Not):
        return x.child
    return Not(x)


def predicate(lhs: Expr, op: str, rhs: Expr) -> Formula:
    """Build a predicate, folding it to a constant when no signal is involved."""
    lv, rv = const_value(lhs), const_value(rhs)
    if lv is not None and rv is not None:
        return TRUE if compare(op, lv, rv) else FALSE
    return Predicate(lhs, op, rhs)


def balanced(items: list, combine) -> Formula:
    """Fold ``items`` into a balanced tree (depth ``log2(n)``), keeping order."""
    if not items:
        raise ValueError("nothing to fold")
    layer = list(items)
    while len(layer) > 1:
        nxt = [combine(layer[i], layer[i + 1]) for i in range(0, len(layer) - 1, 2)]
        if len(layer) % 2:
            nxt.append(layer[-1])
        layer = nxt
    return layer[0]


def conj_all(items: list) -> Formula:
    items = [f for f in items if not isinstance(f, TrueConst)]
    if any(isinstance(f, FalseConst) for f in items):
        return FALSE
    return balanced(items, conj) if items else TRUE


def disj_all(items: list) -> Formula:
    items = [f for f in items if not isinstance(f, FalseConst)]
    if any(isinstance(f, TrueConst) for f in items):
        return TRUE
    return balanced(items, disj) if items else FALSE
