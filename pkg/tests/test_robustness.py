import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbstl.robustness import SemanticsConfig, eval_robust, robustness_vector, signed_robustness
from vbstl.stl import parse_stl, sat_vector
from vbstl.trace import Trace
from vbstl.vbool import VBool

from oracles import close, robust
from strategies import formulas, traces

y9 = Trace.uniform({"y": [-9.0] * 5}, dt=0.1)
always_y = parse_stl("alw (y >= 0)")


@pytest.mark.parametrize("sem,expected", [
    ("max", VBool(False, 9.0)),
    ("constant", VBool(False, 100.0)),
])
def test_static_switched_output_violates(sem, expected):
    assert eval_robust(always_y, y9, 0, SemanticsConfig(sem)) == expected


def test_additive_always_on_constant_violation_integrates():
    # 5 samples of width 0.1 at robustness 9
    assert eval_robust(always_y, y9, 0, SemanticsConfig("add")).isclose(VBool(False, 4.5))


def test_additive_eventually_all_false_example():
    t = Trace.uniform({"x": [-2.0] * 10}, dt=0.1)
    assert eval_robust(parse_stl("ev (x >= 0)"), t, 0, SemanticsConfig("add")).isclose(VBool(False, 2.0))


def test_additive_always_all_true_is_r_over_duration():
    t = Trace.uniform({"x": [3.0] * 6}, dt=0.25)
    assert eval_robust(parse_stl("alw (x >= 0)"), t, 0, SemanticsConfig("add")).isclose(VBool(True, 2.0))


def test_equality_constant_is_configurable():
    t = Trace.uniform({"g": [3.0]})
    assert eval_robust(parse_stl("g == 3"), t, 0, SemanticsConfig(eq_constant=7)) == VBool(True, 7.0)


def test_implication_scale_only_applies_to_additive():
    t = Trace.uniform({"x": [-1.0], "y": [-5.0]})
    f = parse_stl("(x >= 0) => (y >= 0)")
    assert eval_robust(f, t, 0, SemanticsConfig("add")) == VBool(True, 10.0)
    assert eval_robust(f, t, 0, SemanticsConfig("add", implication_scale=2)) == VBool(True, 2.0)
    assert eval_robust(f, t, 0, SemanticsConfig("max")) == VBool(True, 1.0)


def test_node_tags_override_default():
    t = Trace.uniform({"x": [3.0], "y": [6.0]})
    f = parse_stl("(x >= 0) and@add (y >= 0)")
    assert eval_robust(f, t, 0, SemanticsConfig("max")).isclose(VBool(True, 2.0))


def test_random_semantics_keeps_truth_and_is_seeded():
    cfg = SemanticsConfig("random", rng_seed=3)
    a = eval_robust(always_y, y9, 0, cfg)
    b = eval_robust(always_y, y9, 0, cfg)
    assert a == b and not a.truth and 0 < a.rob <= 1
    rng = np.random.default_rng(3)
    c, d = eval_robust(always_y, y9, 0, cfg, rng), eval_robust(always_y, y9, 0, cfg, rng)
    assert c == a and d != c


def test_aliases_and_validation():
    assert SemanticsConfig("additive").default == "add"
    with pytest.raises(ValueError):
        SemanticsConfig("fuzzy")
    with pytest.raises(ValueError):
        SemanticsConfig(eq_constant=0)
    with pytest.raises(IndexError):
        eval_robust(always_y, y9, 5)


def test_signed_robustness():
    assert signed_robustness(always_y, y9) == -9.0


def test_boolean_constants():
    t = Trace.uniform({"x": [0.0]})
    assert eval_robust(parse_stl("true"), t) == VBool(True, math.inf)
    assert eval_robust(parse_stl("alw_[5,6] (x > 1)"), t) == VBool(True, math.inf)
    assert eval_robust(parse_stl("ev_[5,6] (x > 1)"), t) == VBool(False, math.inf)


# properties -------------------------------------------------------------------------


def _check_against_oracle(f, times, sig, sem):
    trace = Trace(times, sig)
    t, r = robustness_vector(f, trace, SemanticsConfig(sem))
    for k in range(len(times)):
        got = VBool(bool(t[k]), float(r[k]))
        assert close(got, robust(f, times, sig, k, sem), 1e-9), (k, got)


@settings(max_examples=300, deadline=None)
@given(formulas, traces, st.sampled_from(["max", "add"]))
def test_array_monitor_matches_scalar_fold(f, xy, sem):
    x, y = map(np.array, xy)
    _check_against_oracle(f, np.arange(float(x.size)), {"x": x, "y": y}, sem)


@settings(max_examples=200, deadline=None)
@given(formulas, traces, st.sampled_from(["max", "add"]), st.data())
def test_array_monitor_matches_scalar_fold_on_uneven_grid(f, xy, sem, data):
    x, y = map(np.array, xy)
    steps = data.draw(st.lists(st.sampled_from([0.5, 1.0, 1.5]), min_size=x.size - 1, max_size=x.size - 1))
    times = np.concatenate([[0.0], np.cumsum(steps)])
    _check_against_oracle(f, times, {"x": x * 1.7, "y": y - 0.3}, sem)


@settings(max_examples=300, deadline=None)
@given(formulas, traces, st.sampled_from(["max", "add", "constant", "random"]))
def test_truth_agrees_with_boolean_semantics(f, xy, sem):
    trace = Trace.uniform({"x": xy[0], "y": xy[1]})
    truth = sat_vector(f, trace)
    for k in range(len(trace)):
        v = eval_robust(f, trace, k, SemanticsConfig(sem))
        assert v.truth == truth[k]
        if sem == "constant":
            assert v.rob == 100.0
        if sem == "random":
            assert 0 < v.rob <= 1
