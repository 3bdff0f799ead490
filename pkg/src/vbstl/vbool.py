"""Valued Booleans: a truth value paired with a non-negative robustness.

Two families of connectives are provided. The *max* family combines
robustness with ``min``/``max``. The *additive* family combines true
robustness like parallel resistors and false robustness by summation, so
every conjunct contributes to the result.

Disjunction is always derived from conjunction by De Morgan, and the
temporal operators are folds of the binary connectives. Every scalar
operation has an array counterpart (suffix ``_arr``) used by the monitor.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

INF = math.inf
MAX, ADD = "max", "add"


@dataclass(frozen=True)
class VBool:
    truth: bool
    rob: float

    def __post_init__(self):
        rob = float(self.rob)
        if math.isnan(rob) or rob < 0:
            raise ValueError(f"robustness must be a non-negative number, got {self.rob!r}")
        object.__setattr__(self, "truth", bool(self.truth))
        object.__setattr__(self, "rob", rob)

    @property
    def signed(self) -> float:
        """Robustness with the sign of the truth value (negative when false)."""
        return self.rob if self.truth else -self.rob

    def __invert__(self) -> "VBool":
        return VBool(not self.truth, self.rob)

    def isclose(self, other: "VBool", tol: float = 1e-9) -> bool:
        return self.truth == other.truth and _close(self.rob, other.rob, tol)

    def __repr__(self) -> str:
        return f"({'T' if self.truth else 'F'}, {self.rob:g})"


TOP = VBool(True, INF)
BOT = VBool(False, INF)


def _close(x: float, y: float, tol: float) -> bool:
    if math.isinf(x) or math.isinf(y):
        return x == y
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def signed(v: VBool) -> float:
    return v.signed


def _check_sem(sem: str) -> str:
    if sem == "additive":
        return ADD
    if sem not in (MAX, ADD):
        raise ValueError(f"unknown connective semantics {sem!r}")
    return sem


# Comparisons -----------------------------------------------------------------


def leq_v(x: float, y: float) -> VBool:
    return VBool(x <= y, abs(y - x))


def lt_v(x: float, y: float) -> VBool:
    return VBool(x < y, abs(y - x))


def geq_v(x: float, y: float) -> VBool:
    return leq_v(y, x)


def gt_v(x: float, y: float) -> VBool:
    return lt_v(y, x)


def eq_v(x: float, y: float, K: float = 100.0) -> VBool:
    if not K > 0:
        raise ValueError("K must be positive")
    return VBool(x == y, K)


def compare_v(op: str, x: float, y: float, K: float = 100.0) -> VBool:
    if op == "==":
        return eq_v(x, y, K)
    return {"<": lt_v, "<=": leq_v, ">=": geq_v, ">": gt_v}[op](x, y)


def compare_arr(op: str, x: np.ndarray, y: np.ndarray, K: float = 100.0):
    if op == "==":
        return x == y, np.full(np.shape(x), float(K))
    rob = np.abs(y - x)
    truth = {"<": x < y, "<=": x <= y, ">=": x >= y, ">": x > y}[op]
    return truth, rob


# Binary connectives ------------------------------------------------------------


def not_v(v: VBool) -> VBool:
    return VBool(not v.truth, v.rob)


def and_max(x: VBool, y: VBool) -> VBool:
    if x.truth and y.truth:
        return VBool(True, min(x.rob, y.rob))
    if x.truth:
        return y
    if y.truth:
        return x
    return VBool(False, max(x.rob, y.rob))


def parallel(x: float, y: float) -> float:
    """``1/(1/x + 1/y)``, with 0 when either side is 0 and ``1/inf = 0``."""
    if x == 0 or y == 0:
        return 0.0
    if math.isinf(x):
        return y
    if math.isinf(y):
        return x
    return 1.0 / (1.0 / x + 1.0 / y)


def and_add(x: VBool, y: VBool) -> VBool:
    if x.truth and y.truth:
        return VBool(True, parallel(x.rob, y.rob))
    if x.truth:
        return y
    if y.truth:
        return x
    return VBool(False, x.rob + y.rob)


def or_max(x: VBool, y: VBool) -> VBool:
    return not_v(and_max(not_v(x), not_v(y)))


def or_add(x: VBool, y: VBool) -> VBool:
    return not_v(and_add(not_v(x), not_v(y)))


def and_op(x: VBool, y: VBool, sem: str = MAX) -> VBool:
    return and_add(x, y) if _check_sem(sem) == ADD else and_max(x, y)


def or_op(x: VBool, y: VBool, sem: str = MAX) -> VBool:
    return or_add(x, y) if _check_sem(sem) == ADD else or_max(x, y)


def sharp_prime(v: VBool, dt: float) -> VBool:
    """Reweight one sample by its step width: false scales up, true scales down."""
    if not dt > 0:
        raise ValueError("step width must be positive")
    return VBool(v.truth, v.rob / dt if v.truth else v.rob * dt)


def sharp(v: VBool, k: float) -> VBool:
    if not k > 0:
        raise ValueError("scale must be positive")
    return VBool(v.truth, v.rob * k)


def implies_add(lhs: VBool, rhs: VBool, k: float = 10.0) -> VBool:
    return or_add(not_v(sharp(lhs, k)), rhs)


def implies_max(lhs: VBool, rhs: VBool) -> VBool:
    return or_max(not_v(lhs), rhs)


def implies_op(lhs: VBool, rhs: VBool, sem: str = MAX, k: float = 10.0) -> VBool:
    return implies_add(lhs, rhs, k) if _check_sem(sem) == ADD else implies_max(lhs, rhs)


# Temporal folds ----------------------------------------------------------------


def always_op(samples: Sequence[VBool], widths: Iterable[float] | None = None, sem: str = MAX) -> VBool:
    """Conjunction over a window; additive samples are weighted by their widths.

    An empty window yields ``TOP``.
    """
    sem = _check_sem(sem)
    samples = list(samples)
    if sem == ADD:
        if widths is None:
            raise ValueError("additive semantics needs step widths")
        widths = list(widths)
        if len(widths) != len(samples):
            raise ValueError("one width per sample is required")
        samples = [sharp_prime(s, w) for s, w in zip(samples, widths)]
    acc = TOP
    for s in samples:
        acc = and_op(acc, s, sem)
    return acc


def eventually_op(samples: Sequence[VBool], widths: Iterable[float] | None = None, sem: str = MAX) -> VBool:
    return not_v(always_op([not_v(s) for s in samples], widths, sem))


def until_op(
    left: Sequence[VBool],
    right: Sequence[VBool],
    widths: Sequence[float] | None,
    window: Iterable[int],
    sem: str = MAX,
    start: int = 0,
) -> VBool:
    """Until evaluated at index ``start``.

    For every release index ``j`` in ``window`` the candidate is
    ``right[j]`` conjoined with ``left`` over ``start .. j-1``; the result is
    the disjunction of the candidates (``BOT`` for an empty window).
    """
    sem = _check_sem(sem)
    if sem == ADD:
        if widths is None:
            raise ValueError("additive semantics needs step widths")
        left = [sharp_prime(v, w) for v, w in zip(left, widths)]
        right = [sharp_prime(v, w) for v, w in zip(right, widths)]
    acc = BOT
    prefix = TOP
    pos = start
    for j in window:
        while pos < j:
            prefix = and_op(prefix, left[pos], sem)
            pos += 1
        acc = or_op(acc, and_op(right[j], prefix, sem), sem)
    return acc


# Array forms -------------------------------------------------------------------


def parallel_arr(x: np.ndarray, y: np.ndarray) -> np.ndarray:
    x, y = np.broadcast_arrays(np.asarray(x, float), np.asarray(y, float))
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        out = 1.0 / (1.0 / x + 1.0 / y)
    out = np.where(np.isinf(x), y, out)
    out = np.where(np.isinf(y), x, out)
    return np.where((x == 0) | (y == 0), 0.0, out)


def and_arr(sem: str, t1, r1, t2, r2):
    """Elementwise conjunction of two VBool arrays given as truth/robustness."""
    both = t1 & t2
    if sem == ADD:
        true_rob = parallel_arr(r1, r2)
        false_rob = r1 + r2
    else:
        true_rob = np.minimum(r1, r2)
        false_rob = np.maximum(r1, r2)
    rob = np.where(both, true_rob, np.where(t1, r2, np.where(t2, r1, false_rob)))
    return both, rob


def or_arr(sem: str, t1, r1, t2, r2):
    t, r = and_arr(sem, ~t1, r1, ~t2, r2)
    return ~t, r
