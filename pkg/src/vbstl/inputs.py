"""Parameterised input signals for falsification.

Each input kind owns a slice of the optimiser's parameter vector and turns
it into a sampled signal over the simulation horizon.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any, Mapping, Sequence

import numpy as np
from scipy.interpolate import PchipInterpolator

from .trace import Trace

RANGE_TOL = 1e-12


@dataclass(frozen=True)
class Bound:
    name: str
    low: float
    high: float

    def __post_init__(self):
        if not (math.isfinite(self.low) and math.isfinite(self.high) and self.high > self.low):
            raise ValueError(f"range of {self.name!r} must be finite and non-degenerate")

    @property
    def width(self) -> float:
        return self.high - self.low


@dataclass(frozen=True)
class ConstantInput:
    name: str
    low: float
    high: float

    def bounds(self) -> list[Bound]:
        return [Bound(self.name, self.low, self.high)]

    def render(self, values: Sequence[float], times: np.ndarray) -> np.ndarray:
        return np.full(times.size, float(values[0]))


@dataclass(frozen=True)
class ControlPointsInput:
    """``n`` values spread evenly over the horizon, joined by interpolation.

    ``interp`` is ``"pchip"`` (shape-preserving piecewise cubic Hermite, no
    overshoot between points) or ``"linear"``.
    """

    name: str
    n: int
    low: float
    high: float
    interp: str = "pchip"

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("at least one control point is needed")
        if self.interp not in ("pchip", "linear"):
            raise ValueError("interp must be 'pchip' or 'linear'")

    def bounds(self) -> list[Bound]:
        return [Bound(f"{self.name}[{i}]", self.low, self.high) for i in range(self.n)]

    def render(self, values: Sequence[float], times: np.ndarray) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if self.n == 1:
            return np.full(times.size, values[0])
        horizon = float(times[-1] - times[0])
        knots = times[0] + np.linspace(0.0, horizon, self.n)
        if self.interp == "linear":
            return np.interp(times, knots, values)
        return PchipInterpolator(knots, values, extrapolate=True)(times)


@dataclass(frozen=True)
class PulseInput:
    """Square wave: ``base`` until ``delay``, then ``base + amplitude`` for the
    first half of every period and ``base`` for the second half.

    Period and amplitude are the optimised parameters.
    """

    name: str
    base: float
    delay: float
    period_range: tuple[float, float]
    amplitude_range: tuple[float, float]

    def bounds(self) -> list[Bound]:
        return [
            Bound(f"{self.name}.period", *self.period_range),
            Bound(f"{self.name}.amplitude", *self.amplitude_range),
        ]

    def render(self, values: Sequence[float], times: np.ndarray) -> np.ndarray:
        period, amplitude = float(values[0]), float(values[1])
        rel = times - times[0] - self.delay
        on = (rel >= 0) & (np.mod(np.maximum(rel, 0.0), period) < period / 2)
        return np.where(on, self.base + amplitude, self.base)


InputParam = ConstantInput | ControlPointsInput | PulseInput


def input_from_dict(doc: Mapping[str, Any]) -> InputParam:
    kind = doc.get("kind", "constant")
    name = str(doc["name"])
    if kind == "constant":
        return ConstantInput(name, float(doc["low"]), float(doc["high"]))
    if kind == "control_points":
        return ControlPointsInput(
            name, int(doc["n"]), float(doc["low"]), float(doc["high"]), doc.get("interp", "pchip")
        )
    if kind == "pulse":
        return PulseInput(
            name, float(doc["base"]), float(doc["delay"]),
            tuple(map(float, doc["period_range"])), tuple(map(float, doc["amplitude_range"])),
        )
    raise ValueError(f"unknown input kind {kind!r}")


def param_bounds(params: Sequence[InputParam]) -> list[Bound]:
    return [b for p in params for b in p.bounds()]


def time_grid(horizon: float, dt: float) -> np.ndarray:
    if not (horizon > 0 and dt > 0):
        raise ValueError("horizon and step must be positive")
    n = int(round(horizon / dt)) + 1
    return dt * np.arange(n)


def check_point(bounds: Sequence[Bound], point: Sequence[float]) -> np.ndarray:
    point = np.asarray(point, dtype=float)
    if point.shape != (len(bounds),):
        raise ValueError(f"expected {len(bounds)} parameters, got {point.size}")
    for b, x in zip(bounds, point):
        slack = RANGE_TOL * max(1.0, abs(b.low), abs(b.high))
        if not (b.low - slack <= x <= b.high + slack):
            raise ValueError(f"parameter {b.name} = {x} outside [{b.low}, {b.high}]")
    return point


def generate_inputs(params: Sequence[InputParam], point: Sequence[float], horizon: float, dt: float) -> Trace:
    """Render all inputs for one parameter vector on a uniform grid."""
    point = check_point(param_bounds(params), point)
    times = time_grid(horizon, dt)
    signals = {}
    i = 0
    for p in params:
        n = len(p.bounds())
        signals[p.name] = p.render(point[i:i + n], times)
        i += n
    return Trace(times, signals)
