"""Systems under test: fixed-step models driven by generated inputs."""

from __future__ import annotations

import math
import subprocess
from dataclasses import dataclass, field
from typing import Any, Mapping, Optional, Sequence

import numpy as np

from .inputs import Bound, ConstantInput, InputParam, check_point, generate_inputs, param_bounds
from .trace import Trace, TraceError


class SimulationError(RuntimeError):
    pass


class SutModel:
    """Base class for step-function models.

    Subclasses set ``name``, ``inputs``, ``outputs``, ``dt``, ``horizon`` and
    ``init_bounds`` and implement :meth:`initial_state` and :meth:`step`.
    """

    name: str = "model"
    inputs: tuple[InputParam, ...] = ()
    outputs: tuple[str, ...] = ()
    dt: float = 1.0
    horizon: float = 1.0
    init_bounds: tuple[Bound, ...] = ()

    def initial_state(self, init: Sequence[float]) -> Any:
        return None

    def step(self, state: Any, u: Mapping[str, float]) -> tuple[Any, dict[str, float]]:
        raise NotImplementedError

    # parameter space ---------------------------------------------------------

    def bounds(self) -> list[Bound]:
        return param_bounds(self.inputs) + list(self.init_bounds)

    def split(self, point: Sequence[float]) -> tuple[np.ndarray, np.ndarray]:
        point = check_point(self.bounds(), point)
        n_in = len(param_bounds(self.inputs))
        return point[:n_in], point[n_in:]

    def run(self, point: Sequence[float]) -> Trace:
        """Generate inputs for ``point`` and simulate them."""
        u, init = self.split(point)
        return simulate(self, generate_inputs(self.inputs, u, self.horizon, self.dt), init)


def simulate(
    model: SutModel,
    inputs: Trace,
    init: Optional[Sequence[float]] = None,
    state: Any = None,
    return_state: bool = False,
):
    """Fixed-step execution over the samples of ``inputs``.

    Pass ``state`` to continue a previous run instead of starting from
    ``init``. With ``return_state`` the final state is returned as well.
    """
    if isinstance(model, ExternalProcessModel):
        out = model.run_trace(inputs, init)
        return (out, None) if return_state else out
    missing = [p.name for p in model.inputs if p.name not in inputs]
    if missing:
        raise TraceError(f"inputs missing signals {missing}")
    if state is None:
        state = model.initial_state(np.asarray(init if init is not None else [], dtype=float))
    names = [p.name for p in model.inputs]
    cols = {name: inputs.signal(name) for name in names}
    outs: dict[str, list[float]] = {name: [] for name in model.outputs}
    for k in range(len(inputs)):
        state, y = model.step(state, {name: float(cols[name][k]) for name in names})
        for name in model.outputs:
            v = float(y[name])
            if math.isnan(v):
                raise SimulationError(f"{model.name}: output {name!r} is NaN at step {k}")
            outs[name].append(v)
    trace = inputs.with_signals(outs, overwrite=True)
    return (trace, state) if return_state else trace


@dataclass
class StaticSwitched(SutModel):
    """Memoryless switched system with two constant inputs in [0, 1].

    ``y = -2(u1 + u2) - 5`` when both inputs reach ``thresh``, otherwise
    ``y = 2((u1 + 1)^2 + (u2 + 1)^2)``.
    """

    thresh: float = 0.7
    name: str = "static_switched"
    dt: float = 0.1
    horizon: float = 1.0

    def __post_init__(self):
        self.inputs = (ConstantInput("u1", 0.0, 1.0), ConstantInput("u2", 0.0, 1.0))
        self.outputs = ("y",)
        self.init_bounds = ()

    def output(self, u1: float, u2: float) -> float:
        if u1 >= self.thresh and u2 >= self.thresh:
            return -2.0 * (u1 + u2) - 5.0
        return 2.0 * ((u1 + 1.0) ** 2 + (u2 + 1.0) ** 2)

    def step(self, state, u):
        return state, {"y": self.output(u["u1"], u["u2"])}


DELTA_SIGMA_COEFFICIENTS = {
    # feedback gains (input gain, x1 feedback, x2 feedback, x3 feedback)
    "scaled": (0.044, 0.044, 0.2881, 0.7997),
    "unit": (1.0, 1.0, 1.0, 1.0),
}


@dataclass
class DeltaSigmaSurrogate(SutModel):
    """Third-order single-bit modulator built from cascaded discrete integrators.

    With gains ``(b, a1, a2, a3)`` and quantiser ``v = sign(x3)``
    (``sign(0) = +1``)::

        x1' = x1 + b*U - a1*v
        x2' = x2 + x1 - a2*v
        x3' = x3 + x2 - a3*v

    ``coefficients="unit"`` uses gains of one everywhere, which is unstable
    for most inputs; the default ``"scaled"`` gains keep the loop stable for
    moderate inputs.
    """

    u_range: tuple[float, float] = (-0.35, 0.35)
    init_range: tuple[float, float] = (-0.1, 0.1)
    coefficients: str = "scaled"
    steps: int = 64
    name: str = "delta_sigma"
    dt: float = 1.0

    def __post_init__(self):
        if self.coefficients not in DELTA_SIGMA_COEFFICIENTS:
            raise ValueError(f"coefficients must be one of {sorted(DELTA_SIGMA_COEFFICIENTS)}")
        self.gains = DELTA_SIGMA_COEFFICIENTS[self.coefficients]
        self.horizon = (self.steps - 1) * self.dt
        self.inputs = (ConstantInput("U", *self.u_range),)
        self.outputs = ("x1", "x2", "x3", "v")
        self.init_bounds = tuple(Bound(f"x{i}0", *self.init_range) for i in (1, 2, 3))

    def initial_state(self, init):
        return tuple(float(x) for x in init) if len(init) else (0.0, 0.0, 0.0)

    def step(self, state, u):
        x1, x2, x3 = state
        b, a1, a2, a3 = self.gains
        v = 1.0 if x3 >= 0 else -1.0
        out = {"x1": x1, "x2": x2, "x3": x3, "v": v}
        return (x1 + b * u["U"] - a1 * v, x2 + x1 - a2 * v, x3 + x2 - a3 * v), out


@dataclass
class ExternalProcessModel(SutModel):
    """A model run as a separate process.

    The process gets the input trace as CSV on standard input (initial-state
    parameters are appended as constant columns) and must print the output
    trace as CSV on standard output. A nonzero exit status is a failed
    simulation.
    """

    command: Sequence[str] = ()
    input_params: Sequence[InputParam] = ()
    output_names: Sequence[str] = ()
    dt: float = 1.0
    horizon: float = 1.0
    init_params: Sequence[Bound] = ()
    timeout: Optional[float] = None
    name: str = "external"
    env: Optional[Mapping[str, str]] = field(default=None, repr=False)

    def __post_init__(self):
        if not self.command:
            raise ValueError("an external model needs a command")
        self.inputs = tuple(self.input_params)
        self.outputs = tuple(self.output_names)
        self.init_bounds = tuple(self.init_params)

    def run_trace(self, inputs: Trace, init: Optional[Sequence[float]] = None) -> Trace:
        extra = {}
        if init is not None:
            for b, x in zip(self.init_bounds, init):
                extra[b.name] = np.full(len(inputs), float(x))
        sent = inputs.with_signals(extra) if extra else inputs
        try:
            proc = subprocess.run(
                list(self.command), input=sent.to_csv(), capture_output=True, text=True,
                timeout=self.timeout, env=dict(self.env) if self.env is not None else None,
            )
        except (OSError, subprocess.TimeoutExpired) as exc:
            raise SimulationError(f"{self.name}: could not run model: {exc}") from None
        if proc.returncode != 0:
            raise SimulationError(
                f"{self.name}: model exited with status {proc.returncode}: {proc.stderr.strip()[:500]}"
            )
        try:
            out = Trace.from_csv(proc.stdout if "\n" in proc.stdout else proc.stdout + "\n")
        except TraceError as exc:
            raise SimulationError(f"{self.name}: unreadable model output: {exc}") from None
        missing = [n for n in self.outputs if n not in out]
        if missing:
            raise SimulationError(f"{self.name}: model output lacks signals {missing}")
        for name, values in out.signals.items():
            if np.isnan(values).any():
                k = int(np.flatnonzero(np.isnan(values))[0])
                raise SimulationError(f"{self.name}: output {name!r} is NaN at step {k}")
        if np.array_equal(out.times, inputs.times):
            return out.with_signals({n: inputs.signal(n) for n in inputs.names if n not in out})
        held = {n: inputs.values_at_times(n, out.times) for n in inputs.names if n not in out}
        return out.with_signals(held)


MODELS = {
    "static_switched": StaticSwitched,
    "delta_sigma": DeltaSigmaSurrogate,
    "external": ExternalProcessModel,
}


def make_model(name: str, **params) -> SutModel:
    try:
        cls = MODELS[name]
    except KeyError:
        raise ValueError(f"unknown model {name!r}; known models: {sorted(MODELS)}") from None
    return cls(**params)
