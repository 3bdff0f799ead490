"""Compile a block graph into one formula plus a manifest of logged signals.

The translator walks backwards from the output block and assigns a formula
table or signal table to every block output it needs. Parts that have no
formula counterpart are *logged*: the block output is treated as a model
signal named after the block, and the manifest records why.

Feedback loops through a unit delay are handled in one of four modes:

``templates``
    loops must match a registered latch pattern (always / eventually);
``blackbox``
    every delay in a loop is logged;
``auto``
    templates where a pattern matches, blackbox elsewhere;
``unroll``
    the whole graph is executed symbolically on a uniform grid of
    ``n_samples`` points, producing a formula over time-shifted signals.
"""

from __future__ import annotations

import dataclasses
import warnings
from dataclasses import dataclass, field
from typing import Mapping, Optional

import numpy as np

from ..stl.ast import (
    Abs, And, Const, Eventually, FalseConst, Formula, Or, Predicate, TrueConst, Var, balanced,
    children, expr_signals, neg, operator_count, walk, FALSE, TRUE,
)
from .graph import AlgebraicLoopError, BlockGraph, GraphError
from .tables import (
    DEFAULT_ENTRY_LIMIT, ENCODINGS, FormulaTable, SignalTable, Table, combine_binary, flatten_table,
    lift_to_end, map_consequents, s2f, translate_switch,
)
from .templates import get_template, match_template, template_params

MODES = ("auto", "templates", "blackbox", "unroll")
REASONS = ("recursive-loop", "inexpressible-block", "formula-as-signal", "forced")
DEFAULT_SIZE_WARNING = 500


class TemplateMismatchError(GraphError):
    pass


class LargeFormulaWarning(UserWarning):
    pass


@dataclass(frozen=True)
class LoggedSignal:
    signal: str
    block: str
    reason: str


@dataclass
class Translation:
    """Result of :func:`translate`.

    ``formula`` is anchored when, read at time 0, it gives the output at the
    final sample. Otherwise it is pointwise: its truth at each sample equals
    the output there. ``final_formula`` is always anchored.
    """

    formula: Formula
    manifest: tuple[LoggedSignal, ...]
    tables: dict[str, Table] = field(repr=False)
    anchored: bool
    horizon: Optional[float]

    @property
    def final_formula(self) -> Formula:
        if self.anchored:
            return self.formula
        if self.horizon is None:
            raise ValueError("a horizon is needed to read a pointwise formula at the final sample")
        if isinstance(self.formula, (TrueConst, FalseConst)):
            return self.formula
        return Eventually(self.formula, self.horizon, self.horizon)

    @property
    def logged_signals(self) -> list[str]:
        return [m.signal for m in self.manifest]


def translate(
    graph: BlockGraph,
    horizon: Optional[float] = None,
    mode: str = "auto",
    encoding: str = "implicative",
    n_samples: Optional[int] = None,
    entry_limit: int = DEFAULT_ENTRY_LIMIT,
    size_warning: int = DEFAULT_SIZE_WARNING,
) -> Translation:
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if encoding not in ENCODINGS:
        raise ValueError(f"encoding must be one of {ENCODINGS}")
    if horizon is not None and not horizon >= 0:
        raise ValueError("horizon must be non-negative")
    if mode == "unroll":
        if n_samples is None or n_samples < 1:
            raise ValueError("unroll mode needs the number of samples")
        if horizon is None:
            raise ValueError("unroll mode needs the horizon")
        return _Unroller(graph, horizon, n_samples, encoding, entry_limit, size_warning).run()
    return _Translator(graph, horizon, mode, encoding, entry_limit).run()


# Shared analysis -----------------------------------------------------------------

_FORMULA_KINDS = ("Relational", "Logical", "Template")
_SIGNAL_CONSUMERS = ("Relational", "Arithmetic", "Abs")


def infer_types(graph: BlockGraph, logged: Mapping[str, str]) -> dict[str, str]:
    """Whether each block output is a ``formula`` or a ``signal``."""
    types: dict[str, Optional[str]] = {}
    for bid, b in graph.blocks.items():
        if bid in logged or b.kind in ("Inport", "Constant", "Arithmetic", "Abs", "Opaque"):
            types[bid] = "signal"
        elif b.kind in _FORMULA_KINDS:
            types[bid] = "formula"
        else:
            types[bid] = None
    for _ in range(len(graph.blocks) + 1):
        changed = False
        for bid, t in types.items():
            if t is not None:
                continue
            b = graph.blocks[bid]
            ins = graph.inputs(bid)
            if b.kind == "UnitDelay":
                new = types[ins[0]]
            else:  # Switch
                d = (types[ins[0]], types[ins[2]])
                new = "formula" if "formula" in d else ("signal" if d == ("signal", "signal") else None)
            if new is not None:
                types[bid] = new
                changed = True
        if not changed:
            break
    return {bid: t or "signal" for bid, t in types.items()}


def initial_logging(graph: BlockGraph) -> tuple[dict[str, str], dict[str, str]]:
    """Forced, opaque and formula-as-signal logging plus the resulting types."""
    logged: dict[str, str] = {}
    for bid in graph.log:
        logged[bid] = "forced"
    for bid, b in graph.blocks.items():
        if b.kind == "Opaque" and bid not in logged:
            logged[bid] = "inexpressible-block"
    while True:
        types = infer_types(graph, logged)
        new = [
            bid for bid, b in graph.blocks.items()
            if bid not in logged and b.kind in _SIGNAL_CONSUMERS
            and any(types[s] == "formula" for s in graph.inputs(bid))
        ]
        if not new:
            return logged, types
        for bid in new:
            logged[bid] = "formula-as-signal"


def _switch_condition(t: Table, params) -> FormulaTable:
    crit = params.get("criterion", "~=0")
    if isinstance(t, SignalTable):
        if crit == "~=0":
            return s2f(t)
        thr = Const(float(params["threshold"]))
        return map_consequents(t, lambda x: Predicate(x, crit, thr), FormulaTable)
    if crit == "~=0":
        return t
    thr = float(params["threshold"])
    hit = (lambda v: v >= thr) if crit == ">=" else (lambda v: v > thr)
    on1, on0 = hit(1.0), hit(0.0)
    if on1 and on0:
        return map_consequents(t, lambda c: TRUE)
    if on1:
        return t
    return map_consequents(t, lambda c: FALSE)


def _as_formula(t: Table) -> FormulaTable:
    return s2f(t) if isinstance(t, SignalTable) else t


def rebalance(f: Formula) -> Formula:
    """Rebuild long chains of one associative connective as balanced trees."""
    memo: dict[int, Formula] = {}

    def leaves(node):
        cls, sem = type(node), node.sem
        out, stack = [], [node]
        while stack:
            x = stack.pop()
            if type(x) is cls and x.sem == sem:
                stack += [x.right, x.left]
            else:
                out.append(x)
        return out

    def go(node):
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, (And, Or)):
            parts = [go(x) for x in leaves(node)]
            cls, sem = type(node), node.sem
            res = balanced(parts, lambda a, b: cls(a, b, sem))
        elif children(node):
            kids = [go(c) for c in children(node)]
            res = _rebuild(node, kids)
        else:
            res = node
        memo[key] = res
        return res

    return go(f)


def _rebuild(node, kids):
    names = ("child",) if len(kids) == 1 else ("left", "right")
    return dataclasses.replace(node, **dict(zip(names, kids)))


def _manifest(graph: BlockGraph, formula: Formula, logged: Mapping[str, str]) -> tuple[LoggedSignal, ...]:
    used: set[str] = set()
    for node in walk(formula):
        if isinstance(node, Predicate):
            used |= expr_signals(node.lhs) | expr_signals(node.rhs)
    return tuple(
        LoggedSignal(bid, bid, logged[bid]) for bid in graph.blocks if bid in logged and bid in used
    )


# Table-based translation -----------------------------------------------------------


class _Translator:
    def __init__(self, graph: BlockGraph, horizon, mode, encoding, limit):
        self.g = graph
        self.horizon = horizon
        self.mode = mode
        self.encoding = encoding
        self.limit = limit
        self.logged, self.types = initial_logging(graph)
        self.latches = {}
        self.memo: dict[str, Table] = {}
        self._analyse_loops()

    def _analyse_loops(self):
        g = self.g
        cut = set(self.logged)
        for comp in g.sccs(frozenset(cut)):
            if not g.cyclic(comp, frozenset(cut)):
                b = g.blocks[comp[0]]
                if b.kind == "UnitDelay":
                    self.logged.setdefault(b.id, "inexpressible-block")
                continue
            delays = [b for b in comp if g.blocks[b].kind == "UnitDelay"]
            if not delays:
                raise AlgebraicLoopError(f"algebraic loop through blocks {comp}")
            match = match_template(g, comp) if self.mode != "blackbox" else None
            if match is not None:
                self.latches[match.latch] = match
                if any(c != match.latch for c in g.consumers(match.delay)):
                    self.logged[match.delay] = "recursive-loop"
            elif self.mode == "templates":
                raise TemplateMismatchError(
                    f"no template matches the feedback loop through blocks {comp}"
                )
            else:
                for d in delays:
                    self.logged[d] = "recursive-loop"
        # remaining cycles would have to avoid every cut point
        g.topo_order(set(self.logged) | {m.delay for m in self.latches.values()})
        self.types = infer_types(g, self.logged)

    def run(self) -> Translation:
        root = _as_formula(self.table(self.g.output))
        formula = flatten_table(root, self.encoding)
        return Translation(
            formula, _manifest(self.g, formula, self.logged), dict(self.memo), root.anchored, self.horizon
        )

    def _lift(self, tables: list[FormulaTable]) -> list[FormulaTable]:
        if any(t.anchored for t in tables) and not all(t.anchored for t in tables):
            if self.horizon is None:
                raise ValueError("a horizon is needed to combine stateful and pointwise parts")
            return [lift_to_end(t, self.horizon) for t in tables]
        return tables

    def pointwise(self, bid: str) -> Table:
        """Table of ``bid`` usable sample by sample, logging it if it is stateful."""
        t = self.table(bid)
        if t.anchored:
            self.logged.setdefault(bid, "inexpressible-block")
            t = SignalTable(((TRUE, Var(bid)),))
        return t

    def formula_input(self, bid: str) -> Formula:
        return flatten_table(_as_formula(self.pointwise(bid)), self.encoding)

    def table(self, bid: str) -> Table:
        hit = self.memo.get(bid)
        if hit is None:
            hit = self._table(bid)
            self.memo[bid] = hit
        return hit

    def _table(self, bid: str) -> Table:
        g = self.g
        b = g.blocks[bid]
        p = b.params
        ins = g.inputs(bid)
        if bid in self.logged:
            return SignalTable(((TRUE, Var(bid)),))
        if bid in self.latches:
            m = self.latches[bid]
            f = self.formula_input(m.source)
            return FormulaTable(((TRUE, get_template(m.template).anchored(f, self.horizon, {})),), True)
        kind = b.kind
        if kind == "Inport":
            return SignalTable(((TRUE, Var(b.signal)),))
        if kind == "Constant":
            return SignalTable(((TRUE, Const(float(p["value"]))),))
        if kind in ("Relational", "Arithmetic"):
            return combine_binary(p["op"], self.table(ins[0]), self.table(ins[1]), self.limit)
        if kind == "Abs":
            return map_consequents(self.table(ins[0]), Abs)
        if kind == "Logical":
            parts = self._lift([_as_formula(self.table(s)) for s in ins])
            if p["op"] == "not":
                return map_consequents(parts[0], neg)
            acc = parts[0]
            for t in parts[1:]:
                acc = combine_binary(p["op"], acc, t, self.limit)
            return acc
        if kind == "Switch":
            d1, d3 = self.table(ins[0]), self.table(ins[2])
            if isinstance(d1, SignalTable) and isinstance(d3, SignalTable):
                cond = _switch_condition(self.pointwise(ins[1]), p)
                return translate_switch(cond, d1, d3, self.limit)
            cond = _switch_condition(self.table(ins[1]), p)
            cond, d1, d3 = self._lift([cond, _as_formula(d1), _as_formula(d3)])
            return translate_switch(cond, d1, d3, self.limit)
        if kind == "Template":
            f = self.formula_input(ins[0])
            tmpl = get_template(p["name"])
            if self.horizon is None:
                raise ValueError("a horizon is needed to translate template blocks")
            return FormulaTable(((TRUE, tmpl.anchored(f, self.horizon, template_params(p))),), True)
        raise GraphError(f"block {bid!r} of kind {kind} cannot be translated here")


# Unrolling ------------------------------------------------------------------------


class _Unroller:
    def __init__(self, graph: BlockGraph, horizon, n, encoding, limit, size_warning):
        self.g = graph
        self.horizon = float(horizon)
        self.n = int(n)
        self.encoding = encoding
        self.limit = limit
        self.size_warning = size_warning
        self.logged, self.types = initial_logging(graph)
        self.times = grid_times(self.horizon, self.n)

    def run(self) -> Translation:
        g = self.g
        delays = {bid for bid, b in g.blocks.items() if b.kind == "UnitDelay"}
        order = g.topo_order(delays | set(self.logged))
        history: dict[str, list[Formula]] = {
            bid: [] for bid, b in g.blocks.items() if b.kind == "Template"
        }
        prev: dict[str, Table] = {}
        cur: dict[str, Table] = {}
        for k in range(self.n):
            cur = {}
            for bid in order:
                cur[bid] = self._step(bid, k, cur, prev, history)
            prev = cur
        root = _as_formula(cur[g.output])
        formula = rebalance(flatten_table(root, self.encoding))
        size = operator_count(formula)
        if size > self.size_warning:
            warnings.warn(
                f"unrolled formula has {size} operators; consider templates or blackbox mode",
                LargeFormulaWarning,
                stacklevel=3,
            )
        return Translation(
            formula, _manifest(g, formula, self.logged), dict(cur), True, self.horizon
        )

    def _step(self, bid, k, cur, prev, history) -> Table:
        g = self.g
        b = g.blocks[bid]
        p = b.params
        ins = g.inputs(bid)
        t_k = float(self.times[k])
        if bid in self.logged:
            return SignalTable(((TRUE, Var(bid, t_k)),))
        kind = b.kind
        if kind == "Inport":
            return SignalTable(((TRUE, Var(b.signal, t_k)),))
        if kind == "Constant":
            return SignalTable(((TRUE, Const(float(p["value"]))),))
        if kind == "UnitDelay":
            if k > 0:
                return prev[ins[0]]
            init = float(p.get("init", 0.0))
            if self.types[bid] == "formula":
                return FormulaTable(((TRUE, TRUE if init != 0 else FALSE),), True)
            return SignalTable(((TRUE, Const(init)),))
        if kind in ("Relational", "Arithmetic"):
            return combine_binary(p["op"], cur[ins[0]], cur[ins[1]], self.limit)
        if kind == "Abs":
            return map_consequents(cur[ins[0]], Abs)
        if kind == "Logical":
            parts = [_as_formula(cur[s]) for s in ins]
            if p["op"] == "not":
                return map_consequents(parts[0], neg)
            acc = parts[0]
            for t in parts[1:]:
                acc = combine_binary(p["op"], acc, t, self.limit)
            return acc
        if kind == "Switch":
            d1, d3 = cur[ins[0]], cur[ins[2]]
            cond = _switch_condition(cur[ins[1]], p)
            if not (isinstance(d1, SignalTable) and isinstance(d3, SignalTable)):
                d1, d3 = _as_formula(d1), _as_formula(d3)
            return translate_switch(cond, d1, d3, self.limit)
        if kind == "Template":
            history[bid].append(flatten_table(_as_formula(cur[ins[0]]), self.encoding))
            tmpl = get_template(p["name"])
            f = tmpl.unrolled(history[bid], self.times, k, template_params(p))
            return FormulaTable(((TRUE, f),), True)
        raise GraphError(f"block {bid!r} of kind {kind} cannot be unrolled")


def grid_times(horizon: float, n: int) -> np.ndarray:
    """Uniform sample times ``k * horizon / (n - 1)`` used by unroll mode."""
    if n == 1:
        return np.zeros(1)
    return np.linspace(0.0, horizon, n)
