"""Qualitative (true/false) satisfaction and negation normal form."""

from __future__ import annotations

import numpy as np

from ..trace import Trace
from .ast import (
    Abs, Always, And, BinOp, Const, Eventually, FalseConst, Formula, Implies, Neg, Not, Or,
    Predicate, Scaled, TrueConst, Until, Var,
)


class NanSampleError(ValueError):
    pass


def eval_expr(e, trace: Trace) -> np.ndarray:
    """Evaluate a signal expression at every sample of ``trace``."""
    n = len(trace)
    if isinstance(e, Const):
        return np.full(n, float(e.value))
    if isinstance(e, Var):
        if e.shift == 0:
            return np.asarray(trace.signal(e.name), dtype=float)
        return trace.values_at_times(e.name, trace.times + e.shift)
    if isinstance(e, BinOp):
        x, y = eval_expr(e.left, trace), eval_expr(e.right, trace)
        if e.op == "+":
            return x + y
        if e.op == "-":
            return x - y
        if e.op == "*":
            return x * y
        if e.op == "/":
            with np.errstate(divide="ignore", invalid="ignore"):
                return np.where(y == 0, np.nan, x / np.where(y == 0, 1.0, y))
        raise ValueError(f"unknown arithmetic operator {e.op!r}")
    if isinstance(e, Neg):
        return -eval_expr(e.arg, trace)
    if isinstance(e, Abs):
        return np.abs(eval_expr(e.arg, trace))
    raise TypeError(f"not an expression: {e!r}")


def predicate_operands(p: Predicate, trace: Trace) -> tuple[np.ndarray, np.ndarray]:
    x, y = eval_expr(p.lhs, trace), eval_expr(p.rhs, trace)
    if np.isnan(x).any() or np.isnan(y).any():
        bad = int(np.flatnonzero(np.isnan(x) | np.isnan(y))[0])
        raise NanSampleError(f"predicate operand is NaN at sample {bad}")
    return x, y


def _relation(op: str, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    if op == "<":
        return x < y
    if op == "<=":
        return x <= y
    if op == ">=":
        return x >= y
    if op == ">":
        return x > y
    return x == y


def sat_vector(f: Formula, trace: Trace) -> np.ndarray:
    """Truth value of ``f`` at every sample index, as a boolean array."""
    return _Sat(trace).eval(f)


def bool_sat(f: Formula, trace: Trace, k: int = 0) -> bool:
    if not 0 <= k < len(trace):
        raise IndexError(f"sample index {k} out of range")
    return bool(sat_vector(f, trace)[k])


class _Sat:
    def __init__(self, trace: Trace):
        self.trace = trace
        self.memo: dict[int, np.ndarray] = {}
        self.keep: list = []  # keeps memoized nodes alive so ids stay unique

    def eval(self, f: Formula) -> np.ndarray:
        key = id(f)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._eval(f)
            self.memo[key] = hit
            self.keep.append(f)
        return hit

    def _eval(self, f: Formula) -> np.ndarray:
        n = len(self.trace)
        if isinstance(f, TrueConst):
            return np.ones(n, dtype=bool)
        if isinstance(f, FalseConst):
            return np.zeros(n, dtype=bool)
        if isinstance(f, Predicate):
            return _relation(f.op, *predicate_operands(f, self.trace))
        if isinstance(f, Not):
            return ~self.eval(f.child)
        if isinstance(f, Scaled):
            return self.eval(f.child)
        if isinstance(f, And):
            return self.eval(f.left) & self.eval(f.right)
        if isinstance(f, Or):
            return self.eval(f.left) | self.eval(f.right)
        if isinstance(f, Implies):
            return ~self.eval(f.left) | self.eval(f.right)
        if isinstance(f, (Always, Eventually)):
            child = self.eval(f.child)
            starts, stops = self.trace.window_bounds(f.a, f.b)
            # prefix counts of true samples give window counts in O(1)
            csum = np.concatenate([[0], np.cumsum(child)])
            count = csum[stops] - csum[starts]
            if isinstance(f, Always):
                return count == stops - starts
            return count > 0
        if isinstance(f, Until):
            return self._until(f)
        raise TypeError(f"not a formula: {f!r}")

    def _until(self, f: Until) -> np.ndarray:
        lhs, rhs = self.eval(f.left), self.eval(f.right)
        n = len(self.trace)
        starts, stops = self.trace.window_bounds(f.a, f.b)
        # first index >= k where the left operand fails
        first_fail = np.full(n + 1, n)
        for k in range(n - 1, -1, -1):
            first_fail[k] = k if not lhs[k] else first_fail[k + 1]
        csum = np.concatenate([[0], np.cumsum(rhs)])
        # release index j needs lhs on [k, j), i.e. j <= first_fail[k]
        last = np.minimum(stops, first_fail[:n] + 1)
        return csum[np.maximum(last, starts)] - csum[starts] > 0


def nnf(f: Formula) -> Formula:
    """Push negations down to predicates.

    Semantics tags and scale factors are carried along, so the result is
    equivalent under every robust semantics as well, with two exceptions:
    implications become disjunctions, and a negated until stays negated
    because the logic has no release operator.
    """
    return _nnf(f, False)


def _nnf(f: Formula, negate: bool) -> Formula:
    if isinstance(f, Not):
        return _nnf(f.child, not negate)
    if isinstance(f, (Predicate,)):
        return Not(f) if negate else f
    if isinstance(f, TrueConst):
        return FalseConst() if negate else f
    if isinstance(f, FalseConst):
        return TrueConst() if negate else f
    if isinstance(f, Scaled):
        return Scaled(_nnf(f.child, negate), f.factor)
    if isinstance(f, And):
        cls = Or if negate else And
        return cls(_nnf(f.left, negate), _nnf(f.right, negate), f.sem)
    if isinstance(f, Or):
        cls = And if negate else Or
        return cls(_nnf(f.left, negate), _nnf(f.right, negate), f.sem)
    if isinstance(f, Implies):
        left = _nnf(f.left, True)
        if f.scale is not None:
            left = Scaled(left, f.scale)
        as_or = Or(left, _nnf(f.right, False), f.sem)
        return _nnf(as_or, negate) if negate else as_or
    if isinstance(f, Always):
        cls = Eventually if negate else Always
        return cls(_nnf(f.child, negate), f.a, f.b, f.sem)
    if isinstance(f, Eventually):
        cls = Always if negate else Eventually
        return cls(_nnf(f.child, negate), f.a, f.b, f.sem)
    if isinstance(f, Until):
        inner = Until(_nnf(f.left, False), _nnf(f.right, False), f.a, f.b, f.sem)
        return Not(inner) if negate else inner
    raise TypeError(f"not a formula: {f!r}")


def is_nnf(f: Formula) -> bool:
    from .ast import walk

    for node in walk(f):
        if isinstance(node, Not) and not isinstance(node.child, Predicate):
            return False
        if isinstance(node, Implies):
            return False
    return True
