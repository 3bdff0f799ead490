"""Data behind the demonstration figures.

``fig5_traces`` builds four traces of a signal ``x`` checked against
``alw (x >= 0)``; their max and additive robustness values show how the two
semantics rank near-violations differently. ``isobar_grid`` tabulates the
signed robustness of a conjunction over a grid of signed operand values.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .robustness import SemanticsConfig, eval_robust
from .stl import parse_stl
from .trace import Trace
from .vbool import VBool, and_op, or_op

FIG5_FORMULA = "alw (x >= 0)"
FIG5_DT = 0.5
FIG5_END = 100.0


def _dip(t: np.ndarray, depth: float, at: float, width: float) -> np.ndarray:
    return depth * np.exp(-(((t - at) / width) ** 2))


def fig5_traces() -> dict[str, Trace]:
    """Traces ``a`` to ``d`` on ``[0, 100]`` with step 0.5.

    a: level 3 with one dip to 1 at t = 48.
    b: ``a`` with a second dip to 1 at t = 20.
    c: starts near 30, settles to 3 and dips to about 0.5 at t = 48.
    d: level 3.5 with one narrow dip to 0.05 at t = 48.
    """
    t = np.arange(0.0, FIG5_END + FIG5_DT / 2, FIG5_DT)
    a = 3.0 - _dip(t, 2.0, 48.0, 3.0)
    b = a - _dip(t, 2.0, 20.0, 3.0)
    c = 3.0 + 27.0 / (1.0 + np.exp((t - 36.0) / 1.5)) - _dip(t, 2.5, 48.0, 3.0)
    d = 3.5 - _dip(t, 3.45, 48.0, 1.0)
    return {name: Trace(t, {"x": x}) for name, x in zip("abcd", (a, b, c, d))}


@dataclass(frozen=True)
class Fig5Row:
    trace: str
    minimum: float
    max_robustness: float
    add_robustness: float


def fig5_rows() -> list[Fig5Row]:
    f = parse_stl(FIG5_FORMULA)
    rows = []
    for name, tr in fig5_traces().items():
        rm = eval_robust(f, tr, 0, SemanticsConfig("max")).signed
        ra = eval_robust(f, tr, 0, SemanticsConfig("add")).signed
        rows.append(Fig5Row(name, float(tr.signal("x").min()), rm, ra))
    return rows


def vbool_from_signed(s: float) -> VBool:
    """Non-negative values map to true; ``-0.0`` maps to false."""
    return VBool(not np.signbit(s), abs(float(s)))


def isobar_grid(sem: str, connective: str = "and", n: int = 101, span: float = 5.0):
    """Signed robustness of ``x op y`` on an ``n`` by ``n`` grid over ``[-span, span]``.

    Returns ``(values, grid)`` with ``grid[i, j]`` the result for
    ``x = values[j]`` and ``y = values[i]``.
    """
    if n < 2:
        raise ValueError("the grid needs at least two points per axis")
    op = {"and": and_op, "or": or_op}[connective]
    values = np.linspace(-span, span, n)
    xs = [vbool_from_signed(v) for v in values]
    grid = np.array([[op(x, y, sem).signed for x in xs] for y in xs])
    return values, grid
