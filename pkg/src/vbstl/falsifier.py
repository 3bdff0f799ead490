"""Robustness-guided falsification by simulated annealing.

One run searches the model's box-shaped parameter space for a point whose
simulation violates the formula, minimising signed robustness. A campaign
repeats independent runs with seeds ``seed + i`` and aggregates success
counts and iteration statistics.
"""

from __future__ import annotations

import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .robustness import SemanticsConfig, eval_robust
from .stl.ast import Formula
from .sut import SimulationError, SutModel
from .trace import Trace
from .transform.execute import execute_graph
from .transform.graph import BlockGraph
from .vbool import VBool

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnnealingSettings:
    initial_temperature: float = 0.5
    cooling: float = 0.97
    restart_after: int = 100  # iterations without a new best before restarting

    def __post_init__(self):
        if not self.initial_temperature > 0:
            raise ValueError("initial_temperature must be positive")
        if not 0 < self.cooling <= 1:
            raise ValueError("cooling must be in (0, 1]")
        if self.restart_after < 1:
            raise ValueError("restart_after must be at least 1")


@dataclass
class Campaign:
    """Everything needed to run falsification repeatedly.

    ``graph`` is set when the formula came from a block graph whose
    translation reads logged block outputs; those are then computed from
    each simulated trace before monitoring.
    """

    model: SutModel
    formula: Formula
    semantics: SemanticsConfig = field(default_factory=SemanticsConfig)
    max_iterations: int = 1000
    repetitions: int = 20
    seed: int = 0
    optimizer: AnnealingSettings = field(default_factory=AnnealingSettings)
    graph: Optional[BlockGraph] = None
    name: str = "campaign"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be at least 1")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")


@dataclass
class RunResult:
    run_index: int
    seed: int
    falsified: bool
    iterations_used: int
    best_point: np.ndarray
    best_signed_robustness: float
    best_trace: Optional[Trace] = field(default=None, repr=False)
    falsifying_trace: Optional[Trace] = field(default=None, repr=False)
    history: list[float] = field(default_factory=list, repr=False)
    failures: list[str] = field(default_factory=list, repr=False)


@dataclass(frozen=True)
class CampaignSummary:
    repetitions: int
    succ: int
    iter: float
    iter_per_succ: Optional[float]

    @staticmethod
    def fmt(x: Optional[float]) -> str:
        return "-" if x is None else f"{x:.1f}"

    def row(self) -> dict[str, str]:
        return {
            "Succ": str(self.succ),
            "Iter": self.fmt(self.iter),
            "Iter/Succ": self.fmt(self.iter_per_succ),
        }


def summarize(runs: Sequence[RunResult]) -> CampaignSummary:
    if not runs:
        raise ValueError("no runs to summarise")
    wins = [r.iterations_used for r in runs if r.falsified]
    return CampaignSummary(
        repetitions=len(runs),
        succ=len(wins),
        iter=float(np.mean([r.iterations_used for r in runs])),
        iter_per_succ=float(np.mean(wins)) if wins else None,
    )


# Annealing primitives --------------------------------------------------------------


def reflect(x: np.ndarray, low: np.ndarray, high: np.ndarray) -> np.ndarray:
    """Fold coordinates back into ``[low, high]`` by mirroring at the walls."""
    width = high - low
    y = np.mod(x - low, 2 * width)
    y = np.where(y > width, 2 * width - y, y)
    return low + y


def anneal_step(
    current: np.ndarray, temperature: float, low: np.ndarray, high: np.ndarray, rng: np.random.Generator
) -> np.ndarray:
    """Gaussian proposal with per-dimension spread ``temperature * width``."""
    current = np.asarray(current, dtype=float)
    if temperature <= 0:
        return current.copy()
    sigma = temperature * (high - low)
    return reflect(current + sigma * rng.standard_normal(current.shape), low, high)


def accept(delta: float, temperature: float, rng: np.random.Generator) -> bool:
    """Metropolis rule: improvements always, deteriorations with ``exp(-delta/T)``."""
    if delta <= 0:
        return True
    if temperature <= 0 or math.isinf(delta):
        return False
    return bool(rng.random() < math.exp(-delta / temperature))


# Runs -------------------------------------------------------------------------------


class _Objective:
    def __init__(self, campaign: Campaign, run_seed: int):
        self.c = campaign
        # separate stream so random semantics does not perturb the search
        self.rng = np.random.default_rng([run_seed, 1])

    def __call__(self, point: np.ndarray) -> tuple[VBool, Trace]:
        trace = self.c.model.run(point)
        if self.c.graph is not None:
            trace = execute_graph(self.c.graph, trace)
        return eval_robust(self.c.formula, trace, 0, self.c.semantics, self.rng), trace


def falsify_once(campaign: Campaign, run_seed: int, run_index: int = 0) -> RunResult:
    """One annealing run; stops at the first violating simulation."""
    bounds = campaign.model.bounds()
    low = np.array([b.low for b in bounds])
    high = np.array([b.high for b in bounds])
    settings = campaign.optimizer
    rng = np.random.default_rng(run_seed)
    objective = _Objective(campaign, run_seed)

    result = RunResult(run_index, run_seed, False, 0, low.copy(), math.inf)
    best = math.inf
    current_point: Optional[np.ndarray] = None
    current_value = math.inf
    temperature = settings.initial_temperature
    stagnant = 0

    while result.iterations_used < campaign.max_iterations:
        if current_point is None or stagnant >= settings.restart_after:
            proposal = rng.uniform(low, high)
            temperature = settings.initial_temperature
            restart = True
            stagnant = 0
        else:
            proposal = anneal_step(current_point, temperature, low, high, rng)
            restart = False
        result.iterations_used += 1
        try:
            value, trace = objective(proposal)
        except SimulationError as exc:
            log.warning("run %d: simulation failed at %s: %s", run_index, proposal, exc)
            result.failures.append(str(exc))
            stagnant += 1
            temperature *= settings.cooling
            result.history.append(best)
            continue
        score = value.signed
        if score < best or not value.truth:
            best = score
            stagnant = 0
            result.best_point = proposal
            result.best_signed_robustness = score
            result.best_trace = trace
        else:
            stagnant += 1
        result.history.append(best)
        if not value.truth:
            result.falsified = True
            result.falsifying_trace = trace
            break
        if restart or accept(score - current_value, temperature, rng):
            current_point, current_value = proposal, score
        temperature *= settings.cooling
    return result


def _run_indexed(args):
    campaign, i = args
    return falsify_once(campaign, campaign.seed + i, i)


def run_campaign(campaign: Campaign, jobs: int = 1) -> tuple[CampaignSummary, list[RunResult]]:
    """Independent runs with seeds ``seed + i``; results are ordered by run index."""
    tasks = [(campaign, i) for i in range(campaign.repetitions)]
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            runs = list(pool.map(_run_indexed, tasks))
    else:
        runs = [_run_indexed(t) for t in tasks]
    return summarize(runs), runs
