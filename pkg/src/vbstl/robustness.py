"""Robustness monitor: evaluates formulas over traces to Valued Booleans."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .stl.ast import (
    Always, And, Eventually, FalseConst, Formula, Implies, Not, Or, Predicate, Scaled, TrueConst,
    Until,
)
from .stl.boolean import predicate_operands, sat_vector
from .trace import Trace
from .vbool import ADD, MAX, VBool, and_arr, compare_arr, or_arr

SEMANTICS = ("max", "add", "constant", "random")
_ALIASES = {"additive": "add", "const": "constant"}


@dataclass(frozen=True)
class SemanticsConfig:
    """Evaluation settings.

    ``default`` selects the connective family for nodes without their own tag.
    ``constant`` and ``random`` replace the robustness of the whole formula by
    a fixed magnitude or a uniform draw from (0, 1], keeping the truth value.
    """

    default: str = "max"
    eq_constant: float = 100.0
    implication_scale: float = 10.0
    constant_magnitude: float = 100.0
    rng_seed: int = 0

    def __post_init__(self):
        sem = _ALIASES.get(self.default, self.default)
        if sem not in SEMANTICS:
            raise ValueError(f"unknown semantics {self.default!r}; expected one of {SEMANTICS}")
        object.__setattr__(self, "default", sem)
        for name in ("eq_constant", "implication_scale", "constant_magnitude"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")

    @property
    def connective(self) -> str:
        return self.default if self.default in (MAX, ADD) else MAX


def eval_robust(
    f: Formula,
    trace: Trace,
    k: int = 0,
    cfg: SemanticsConfig | None = None,
    rng: Optional[np.random.Generator] = None,
) -> VBool:
    cfg = cfg or SemanticsConfig()
    if not 0 <= k < len(trace):
        raise IndexError(f"sample index {k} out of range")
    if cfg.default == "constant":
        return VBool(bool(sat_vector(f, trace)[k]), cfg.constant_magnitude)
    if cfg.default == "random":
        truth = bool(sat_vector(f, trace)[k])
        rng = rng if rng is not None else np.random.default_rng(cfg.rng_seed)
        return VBool(truth, 1.0 - rng.random())
    t, r = robustness_vector(f, trace, cfg)
    return VBool(bool(t[k]), float(r[k]))


def signed_robustness(f: Formula, trace: Trace, k: int = 0, cfg: SemanticsConfig | None = None,
                      rng: Optional[np.random.Generator] = None) -> float:
    return eval_robust(f, trace, k, cfg, rng).signed


def robustness_vector(f: Formula, trace: Trace, cfg: SemanticsConfig | None = None):
    """Truth and robustness arrays of ``f`` at every sample (max/add only)."""
    return _Robust(trace, cfg or SemanticsConfig()).eval(f)


def robustness_vectors(formulas: Sequence[Formula], trace: Trace, cfg: SemanticsConfig | None = None):
    """:func:`robustness_vector` for many formulas over one trace.

    Shared subformulas (the same node object) are evaluated once.
    """
    ev = _Robust(trace, cfg or SemanticsConfig())
    return [ev.eval(f) for f in formulas]


# Window reductions --------------------------------------------------------------


def weight(t: np.ndarray, r: np.ndarray, widths: np.ndarray) -> np.ndarray:
    """Per-sample step-width reweighting used by the additive temporal operators."""
    return np.where(t, r / widths, r * widths)


def conj_reduce(sem: str, t: np.ndarray, r: np.ndarray) -> tuple[bool, float]:
    """Conjunction of a whole VBool array; the empty conjunction is true with inf."""
    if t.size == 0:
        return True, np.inf
    false = ~t
    if false.any():
        fr = r[false]
        return False, float(fr.sum() if sem == ADD else fr.max())
    if sem == MAX:
        return True, float(r.min())
    if (r == 0).any():
        return True, 0.0
    inv = float(np.sum(1.0 / r))
    return True, (np.inf if inv == 0 else 1.0 / inv)


def disj_reduce(sem: str, t: np.ndarray, r: np.ndarray) -> tuple[bool, float]:
    truth, rob = conj_reduce(sem, ~t, r)
    return not truth, rob


def conj_accumulate(sem: str, t: np.ndarray, r: np.ndarray):
    """Inclusive prefix conjunctions: entry ``i`` conjoins samples ``0..i``."""
    false = ~t
    any_false = np.cumsum(false) > 0
    if sem == MAX:
        false_rob = np.maximum.accumulate(np.where(false, r, -np.inf))
        true_rob = np.minimum.accumulate(np.where(t, r, np.inf))
    else:
        false_rob = np.cumsum(np.where(false, r, 0.0))
        any_zero = np.cumsum(t & (r == 0)) > 0
        with np.errstate(divide="ignore"):
            inv = np.cumsum(np.where(t, 1.0 / np.where(r == 0, 1.0, r), 0.0))
            true_rob = np.where(any_zero, 0.0, np.where(inv == 0, np.inf, 1.0 / np.where(inv == 0, 1.0, inv)))
    return ~any_false, np.where(any_false, false_rob, true_rob)


class _Robust:
    def __init__(self, trace: Trace, cfg: SemanticsConfig):
        self.trace = trace
        self.cfg = cfg
        self.widths = trace.step_widths()
        self.memo: dict[int, tuple] = {}
        self.keep: list = []

    def sem(self, node) -> str:
        return node.sem or self.cfg.connective

    def eval(self, f: Formula):
        key = id(f)
        hit = self.memo.get(key)
        if hit is None:
            hit = self._eval(f)
            self.memo[key] = hit
            self.keep.append(f)
        return hit

    def _eval(self, f: Formula):
        n = len(self.trace)
        if isinstance(f, TrueConst):
            return np.ones(n, dtype=bool), np.full(n, np.inf)
        if isinstance(f, FalseConst):
            return np.zeros(n, dtype=bool), np.full(n, np.inf)
        if isinstance(f, Predicate):
            x, y = predicate_operands(f, self.trace)
            return compare_arr(f.op, x, y, self.cfg.eq_constant)
        if isinstance(f, Not):
            t, r = self.eval(f.child)
            return ~t, r
        if isinstance(f, Scaled):
            t, r = self.eval(f.child)
            return t, r * f.factor
        if isinstance(f, And):
            return and_arr(self.sem(f), *self.eval(f.left), *self.eval(f.right))
        if isinstance(f, Or):
            return or_arr(self.sem(f), *self.eval(f.left), *self.eval(f.right))
        if isinstance(f, Implies):
            sem = self.sem(f)
            lt, lr = self.eval(f.left)
            scale = f.scale
            if scale is None and sem == ADD:
                scale = self.cfg.implication_scale
            if scale is not None:
                lr = lr * scale
            return or_arr(sem, ~lt, lr, *self.eval(f.right))
        if isinstance(f, (Always, Eventually)):
            return self._window(f)
        if isinstance(f, Until):
            return self._until(f)
        raise TypeError(f"not a formula: {f!r}")

    def _window(self, f):
        sem = self.sem(f)
        t, r = self.eval(f.child)
        ev = isinstance(f, Eventually)
        if ev:
            t = ~t
        if sem == ADD:
            r = weight(t, r, self.widths)
        starts, stops = self.trace.window_bounds(f.a, f.b)
        n = len(self.trace)
        out_t = np.empty(n, dtype=bool)
        out_r = np.empty(n)
        for k in range(n):
            s, e = starts[k], stops[k]
            out_t[k], out_r[k] = conj_reduce(sem, t[s:e], r[s:e])
        return (~out_t if ev else out_t), out_r

    def _until(self, f: Until):
        sem = self.sem(f)
        lt, lr = self.eval(f.left)
        rt, rr = self.eval(f.right)
        if sem == ADD:
            lr = weight(lt, lr, self.widths)
            rr = weight(rt, rr, self.widths)
        starts, stops = self.trace.window_bounds(f.a, f.b)
        n = len(self.trace)
        out_t = np.zeros(n, dtype=bool)
        out_r = np.full(n, np.inf)
        for k in range(n):
            s, e = starts[k], stops[k]
            if s >= e:
                continue
            # exclusive prefix conjunction of the left operand over k..j-1
            pt, pr = conj_accumulate(sem, lt[k:e - 1], lr[k:e - 1])
            pt = np.concatenate([[True], pt])[s - k:]
            pr = np.concatenate([[np.inf], pr])[s - k:]
            ct, cr = and_arr(sem, rt[s:e], rr[s:e], pt, pr)
            out_t[k], out_r[k] = disj_reduce(sem, ct, cr)
        return out_t, out_r
