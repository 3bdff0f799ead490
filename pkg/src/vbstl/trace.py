"""Discrete-time multi-signal traces.

A :class:`Trace` is a strictly increasing vector of time stamps together with
named sample sequences, one value per time stamp. Traces are treated as
immutable values; every operation returns a new trace.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping

import numpy as np

# Absolute slack used when comparing time stamps against window bounds, scaled
# by the magnitude of the stamps involved.
TIME_EPS = 1e-9


class TraceError(ValueError):
    pass


class UnknownSignalError(TraceError, KeyError):
    def __init__(self, name: str):
        super().__init__(f"unknown signal {name!r}")
        self.name = name

    def __str__(self) -> str:
        return self.args[0]


def _slack(t: float) -> float:
    return TIME_EPS * max(1.0, abs(t))


@dataclass(frozen=True, eq=False)
class Trace:
    """Time stamps plus named real-valued samples.

    ``final_width`` optionally pins the hold duration of the last sample.
    When it is ``None`` the last step width repeats the previous one.
    """

    times: np.ndarray
    signals: Mapping[str, np.ndarray]
    final_width: float | None = field(default=None)

    def __post_init__(self):
        times = np.asarray(self.times, dtype=float).reshape(-1)
        if times.size == 0:
            raise TraceError("trace must contain at least one time stamp")
        if not np.all(np.isfinite(times)):
            raise TraceError("time stamps must be finite")
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise TraceError("time stamps must be strictly increasing")
        sigs = {}
        for name, values in self.signals.items():
            arr = np.asarray(values, dtype=float).reshape(-1)
            if arr.size != times.size:
                raise TraceError(
                    f"signal {name!r} has {arr.size} samples, expected {times.size}"
                )
            arr.setflags(write=False)
            sigs[str(name)] = arr
        times.setflags(write=False)
        if self.final_width is not None and not self.final_width > 0:
            raise TraceError("final_width must be strictly positive")
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "signals", sigs)

    @classmethod
    def uniform(cls, signals: Mapping[str, Iterable[float]], dt: float = 1.0, t0: float = 0.0) -> "Trace":
        sigs = {k: np.asarray(list(v) if not isinstance(v, np.ndarray) else v, dtype=float)
                for k, v in signals.items()}
        n = len(next(iter(sigs.values())))
        return cls(t0 + dt * np.arange(n), sigs)

    def __len__(self) -> int:
        return self.times.size

    def __contains__(self, name: str) -> bool:
        return name in self.signals

    def __eq__(self, other) -> bool:
        if not isinstance(other, Trace):
            return NotImplemented
        return (
            np.array_equal(self.times, other.times)
            and self.signals.keys() == other.signals.keys()
            and all(np.array_equal(v, other.signals[k], equal_nan=True) for k, v in self.signals.items())
            and self.final_width == other.final_width
        )

    __hash__ = None

    def __repr__(self) -> str:
        names = ", ".join(self.signals)
        return f"Trace(n={len(self)}, t=[{self.times[0]:g}, {self.times[-1]:g}], signals=[{names}])"

    @property
    def names(self) -> list[str]:
        return list(self.signals)

    @property
    def duration(self) -> float:
        return float(self.times[-1] - self.times[0])

    def signal(self, name: str) -> np.ndarray:
        try:
            return self.signals[name]
        except KeyError:
            raise UnknownSignalError(name) from None

    def sample_at(self, name: str, k: int) -> float:
        values = self.signal(name)
        if not 0 <= k < values.size:
            raise IndexError(f"sample index {k} out of range for trace of length {values.size}")
        return float(values[k])

    def value_at_time(self, name: str, t: float) -> float:
        """Zero-order-hold lookup: the sample at the last stamp not after ``t``.

        Times before the first stamp read the first sample; times past the end
        read the last one.
        """
        values = self.signal(name)
        j = int(np.searchsorted(self.times, t + _slack(t), side="right")) - 1
        return float(values[min(max(j, 0), values.size - 1)])

    def step_widths(self) -> np.ndarray:
        n = len(self)
        if n == 1:
            return np.array([self.final_width if self.final_width is not None else 1.0])
        widths = np.empty(n)
        widths[:-1] = np.diff(self.times)
        widths[-1] = self.final_width if self.final_width is not None else widths[-2]
        return widths

    def window_indices(self, k: int, a: float, b: float) -> range:
        """Indices ``j`` with ``times[k] + a <= times[j] <= times[k] + b``.

        The window is resolved on time stamps, so non-uniform grids work. An
        empty range is returned when the window lies past the horizon.
        """
        if a < 0 or b < a:
            raise ValueError(f"invalid window [{a}, {b}]")
        t = self.times[k]
        lo = t + a
        start = int(np.searchsorted(self.times, lo - _slack(lo), side="left"))
        if math.isinf(b):
            stop = len(self)
        else:
            hi = t + b
            stop = int(np.searchsorted(self.times, hi + _slack(hi), side="right"))
        return range(start, max(start, stop))

    def window_bounds(self, a: float, b: float) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized ``window_indices``: ``(starts, stops)`` for every sample.

        The window of sample ``k`` is ``range(starts[k], stops[k])``.
        """
        if a < 0 or b < a:
            raise ValueError(f"invalid window [{a}, {b}]")
        lo = self.times + a
        starts = np.searchsorted(self.times, lo - TIME_EPS * np.maximum(1.0, np.abs(lo)), side="left")
        if math.isinf(b):
            stops = np.full(len(self), len(self))
        else:
            hi = self.times + b
            stops = np.searchsorted(self.times, hi + TIME_EPS * np.maximum(1.0, np.abs(hi)), side="right")
        return starts, np.maximum(starts, stops)

    def values_at_times(self, name: str, ts: np.ndarray) -> np.ndarray:
        """Vectorized zero-order-hold lookup, clamped at both ends."""
        values = self.signal(name)
        ts = np.asarray(ts, dtype=float)
        j = np.searchsorted(self.times, ts + TIME_EPS * np.maximum(1.0, np.abs(ts)), side="right") - 1
        return values[np.clip(j, 0, values.size - 1)]

    def with_signals(self, extra: Mapping[str, Iterable[float]], overwrite: bool = False) -> "Trace":
        sigs = dict(self.signals)
        for name, values in extra.items():
            if name in sigs and not overwrite:
                raise TraceError(f"signal {name!r} already present")
            sigs[name] = np.asarray(values, dtype=float)
        return Trace(self.times, sigs, self.final_width)

    def select(self, names: Iterable[str]) -> "Trace":
        return Trace(self.times, {n: self.signal(n) for n in names}, self.final_width)

    def head(self, n: int) -> "Trace":
        return Trace(self.times[:n], {k: v[:n] for k, v in self.signals.items()})

    def resample_piecewise_constant(self, factor: int) -> "Trace":
        """Split every step into ``factor`` sub-steps holding the left value.

        The last sample is kept and keeps its original hold width, so the
        refined trace describes the same piecewise-constant function.
        """
        if factor < 1 or int(factor) != factor:
            raise ValueError("factor must be a positive integer")
        factor = int(factor)
        if factor == 1:
            return self
        n = len(self)
        last_width = float(self.step_widths()[-1])
        if n == 1:
            return Trace(self.times, self.signals, last_width)
        frac = np.arange(factor) / factor
        starts = self.times[:-1]
        steps = np.diff(self.times)
        fine = (starts[:, None] + steps[:, None] * frac[None, :]).reshape(-1)
        times = np.append(fine, self.times[-1])
        sigs = {
            name: np.append(np.repeat(values[:-1], factor), values[-1])
            for name, values in self.signals.items()
        }
        return Trace(times, sigs, last_width)

    # CSV interchange -------------------------------------------------------

    def to_csv(self, path: str | Path | None = None) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["time", *self.signals])
        cols = [self.times, *self.signals.values()]
        for row in zip(*cols):
            writer.writerow([repr(float(x)) for x in row])
        text = buf.getvalue()
        if path is not None:
            Path(path).write_text(text, encoding="utf-8")
        return text

    @classmethod
    def from_csv(cls, source: str | Path | io.TextIOBase) -> "Trace":
        """Read a trace from a path, an open text stream, or CSV text."""
        if isinstance(source, io.TextIOBase):
            text = source.read()
        elif isinstance(source, Path) or "\n" not in str(source):
            text = Path(source).read_text(encoding="utf-8")
        else:
            text = str(source)
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        if not rows:
            raise TraceError("empty CSV")
        header = [h.strip() for h in rows[0]]
        if not header or header[0] != "time":
            raise TraceError("first CSV column must be 'time'")
        if len(set(header)) != len(header):
            raise TraceError("duplicate column names in CSV header")
        try:
            data = np.array([[float(c) for c in r] for r in rows[1:]], dtype=float)
        except ValueError as exc:
            raise TraceError(f"non-numeric CSV cell: {exc}") from None
        if data.ndim != 2 or data.shape[1] != len(header):
            raise TraceError("ragged CSV rows")
        return cls(data[:, 0], {h: data[:, i] for i, h in enumerate(header[1:], start=1)})


def sample_at(trace: Trace, name: str, k: int) -> float:
    return trace.sample_at(name, k)


def step_widths(trace: Trace) -> np.ndarray:
    return trace.step_widths()


def window_indices(trace: Trace, k: int, a: float, b: float) -> range:
    return trace.window_indices(k, a, b)


def resample_piecewise_constant(trace: Trace, factor: int) -> Trace:
    return trace.resample_piecewise_constant(factor)


def in_window(t: float, lo: float, hi: float) -> bool:
    """Closed-interval membership with the same slack as ``window_indices``."""
    return lo - _slack(lo) <= t <= hi + _slack(hi)
