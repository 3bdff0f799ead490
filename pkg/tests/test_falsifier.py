import math
from dataclasses import dataclass

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbstl.falsifier import (
    AnnealingSettings, Campaign, RunResult, accept, anneal_step, falsify_once, reflect, run_campaign,
    summarize,
)
from vbstl.inputs import ConstantInput
from vbstl.robustness import SemanticsConfig, eval_robust
from vbstl.stl import parse_stl
from vbstl.sut import SimulationError, StaticSwitched, SutModel

PHI = parse_stl("alw (y >= 0)")


def run(falsified, iterations):
    return RunResult(0, 0, falsified, iterations, np.zeros(2), 0.0)


# aggregation ----------------------------------------------------------------------


def test_all_runs_succeed():
    s = summarize([run(True, 10)] * 20)
    assert (s.succ, s.iter, s.iter_per_succ) == (20, 10.0, 10.0)


def test_mixed_runs():
    s = summarize([run(True, 100), run(True, 300), run(False, 1000), run(False, 1000)])
    assert (s.succ, s.iter, s.iter_per_succ) == (2, 600.0, 200.0)
    assert s.row() == {"Succ": "2", "Iter": "600.0", "Iter/Succ": "200.0"}


def test_no_success_prints_dash():
    s = summarize([run(False, 1000)] * 3)
    assert s.iter_per_succ is None
    assert s.row()["Iter/Succ"] == "-"


def test_summarize_needs_runs():
    with pytest.raises(ValueError):
        summarize([])


# primitives -----------------------------------------------------------------------


def test_zero_temperature_freezes():
    rng = np.random.default_rng(0)
    x = np.array([0.3, 0.6])
    assert np.array_equal(anneal_step(x, 0.0, np.zeros(2), np.ones(2), rng), x)


def test_reflection_examples():
    low, high = np.zeros(3), np.ones(3)
    assert reflect(np.array([1.2, -0.3, 2.5]), low, high) == pytest.approx([0.8, 0.3, 0.5])


@settings(max_examples=300, deadline=None)
@given(st.floats(-1e3, 1e3), st.floats(-10, 10), st.floats(0.01, 10))
def test_reflection_lands_in_box(x, low, width):
    y = reflect(np.array([x]), np.array([low]), np.array([low + width]))[0]
    assert low - 1e-9 <= y <= low + width + 1e-9
    if low <= x <= low + width:
        assert y == pytest.approx(x)


def test_metropolis_rule():
    rng = np.random.default_rng(0)
    assert accept(-1.0, 0.1, rng)
    assert accept(0.0, 0.1, rng)
    assert not accept(1.0, 0.0, rng)
    assert not accept(math.inf, 1.0, rng)
    hits = np.mean([accept(1.0, 1.0, rng) for _ in range(20000)])
    assert hits == pytest.approx(math.exp(-1.0), abs=0.02)


def test_proposal_spread_scales_with_temperature():
    rng = np.random.default_rng(1)
    low, high = np.zeros(1), np.full(1, 100.0)
    steps = [anneal_step(np.array([50.0]), 0.01, low, high, rng)[0] - 50.0 for _ in range(5000)]
    assert np.std(steps) == pytest.approx(1.0, rel=0.05)


def test_settings_validation():
    with pytest.raises(ValueError):
        AnnealingSettings(cooling=1.5)
    with pytest.raises(ValueError):
        Campaign(StaticSwitched(), PHI, max_iterations=0)


# runs -----------------------------------------------------------------------------


def campaign(sem="max", thresh=0.7, formula=PHI, **kw):
    return Campaign(StaticSwitched(thresh=thresh), formula, SemanticsConfig(sem), **kw)


def test_tautology_uses_every_iteration():
    r = falsify_once(campaign(formula=parse_stl("alw (y >= -1000)"), max_iterations=150), 3)
    assert not r.falsified
    assert r.iterations_used == 150
    assert len(r.history) == 150


def test_constant_semantics_finds_the_corner():
    r = falsify_once(campaign("constant", max_iterations=1000), 0)
    assert r.falsified
    assert r.best_signed_robustness == -100.0
    assert all(x >= 0.7 for x in r.best_point)
    assert r.falsifying_trace is not None


def test_same_seed_same_run():
    c = campaign("add", max_iterations=200)
    a, b = falsify_once(c, 5), falsify_once(c, 5)
    assert (a.falsified, a.iterations_used, a.history) == (b.falsified, b.iterations_used, b.history)
    assert np.array_equal(a.best_point, b.best_point)


def test_random_semantics_is_reproducible():
    c = campaign("random", max_iterations=100)
    assert falsify_once(c, 2).history == falsify_once(c, 2).history


@pytest.mark.parametrize("sem", ["max", "add"])
def test_best_value_matches_objective_and_history_never_rises(sem):
    c = campaign(sem, thresh=0.9, max_iterations=300)
    r = falsify_once(c, 1)
    v = eval_robust(PHI, c.model.run(r.best_point), 0, c.semantics)
    assert v.signed == r.best_signed_robustness
    assert r.history[-1] == r.best_signed_robustness
    assert all(b <= a for a, b in zip(r.history, r.history[1:]))


def test_parallel_runs_match_serial():
    c = campaign("max", repetitions=3, max_iterations=80)
    s1, r1 = run_campaign(c, jobs=1)
    s2, r2 = run_campaign(c, jobs=2)
    assert s1 == s2
    assert [r.history for r in r1] == [r.history for r in r2]
    assert [r.seed for r in r1] == [0, 1, 2]


@dataclass
class Flaky(SutModel):
    """Fails on the left half of the box."""

    name: str = "flaky"

    def __post_init__(self):
        self.inputs = (ConstantInput("u", 0.0, 1.0),)
        self.outputs = ("y",)

    def step(self, state, u):
        if u["u"] < 0.5:
            raise SimulationError("unstable")
        return state, {"y": u["u"]}


def test_failed_simulations_count_as_iterations():
    c = Campaign(Flaky(), parse_stl("alw (y >= 0)"), max_iterations=60)
    r = falsify_once(c, 0)
    assert r.iterations_used == 60
    assert len(r.failures) > 0
    assert len(r.history) == 60
    assert r.best_point[0] >= 0.5
