import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbstl.figures import FIG5_FORMULA, fig5_rows, fig5_traces, isobar_grid, vbool_from_signed
from vbstl.laws import check_law, check_laws, law_table, random_vbools, rel_error
from vbstl.plotting import plot_convergence, plot_fig5, plot_isobars
from vbstl.stl import parse_stl
from vbstl.vbool import ADD, VBool, and_add, and_arr, and_max

from oracles import robust

# Values computed once from the constructed traces; they pin the figure data.
FIG5 = {
    "a": (1.0, 0.0277849),
    "b": (1.0, 0.0259864),
    "c": (0.509054, 0.0379893),
    "d": (0.05, 0.0251781),
}


def test_fig5_values():
    for row in fig5_rows():
        mx, add = FIG5[row.trace]
        assert row.max_robustness == pytest.approx(mx, rel=1e-5)
        assert row.add_robustness == pytest.approx(add, rel=1e-5)
        assert row.minimum == pytest.approx(row.max_robustness)


def test_fig5_values_match_scalar_fold():
    f = parse_stl(FIG5_FORMULA)
    rows = {r.trace: r for r in fig5_rows()}
    for name, trace in fig5_traces().items():
        sig = {"x": trace.signal("x")}
        assert robust(f, trace.times, sig, 0, "max").rob == pytest.approx(rows[name].max_robustness, rel=1e-12)
        assert robust(f, trace.times, sig, 0, "add").rob == pytest.approx(rows[name].add_robustness, rel=1e-9)


def test_fig5_traces_share_a_grid():
    traces = fig5_traces()
    grids = [t.times for t in traces.values()]
    assert all(np.array_equal(g, grids[0]) for g in grids)
    assert all(t.signal("x").min() > 0 for t in traces.values())


def test_vbool_from_signed():
    assert vbool_from_signed(2.0) == VBool(True, 2.0)
    assert vbool_from_signed(-2.0) == VBool(False, 2.0)
    assert vbool_from_signed(0.0) == VBool(True, 0.0)
    assert vbool_from_signed(-0.0) == VBool(False, 0.0)


def test_isobar_grid_orientation():
    values, grid = isobar_grid("add", n=5, span=2.0)
    assert values.tolist() == [-2.0, -1.0, 0.0, 1.0, 2.0]
    # row i is y, column j is x
    assert grid[4, 3] == and_add(VBool(True, 1.0), VBool(True, 2.0)).signed
    assert grid[0, 3] == -2.0
    _, gmax = isobar_grid("max", n=5, span=2.0)
    assert gmax[4, 3] == and_max(VBool(True, 1.0), VBool(True, 2.0)).signed
    _, gor = isobar_grid("max", "or", n=5, span=2.0)
    assert gor[0, 3] == 1.0


def test_plots_write_pngs(tmp_path):
    traces = fig5_traces()
    assert plot_fig5(traces, {k: k for k in traces}, tmp_path / "f.png").stat().st_size > 0
    values, grid = isobar_grid("add", n=11)
    assert plot_isobars(values, {"add": grid, "max": isobar_grid("max", n=11)[1]}, tmp_path / "i.png").exists()
    assert plot_convergence([[3.0, 2.0, -1.0], [5.0, 5.0]], tmp_path / "c.png", "demo").exists()


# laws -----------------------------------------------------------------------------


def test_small_law_run_is_clean():
    results = check_laws(n=5000, seed=9)
    assert all(r.ok for r in results), [r for r in results if not r.ok]


def test_checker_detects_a_false_law():
    # and_add is idempotent only on robustness 0 and infinity, so claiming it in general must fail
    rng = np.random.default_rng(0)
    x = random_vbools(rng, 1000)
    failures, worst = check_law(lambda x, y, z: (and_arr(ADD, *x, *x), x), x, x, x, 1e-9)
    assert failures > 800 and worst > 0.1


def test_rel_error_infinities():
    a = np.array([math.inf, math.inf, 1.0, 0.0])
    b = np.array([math.inf, 1.0, 1.0 + 1e-12, 0.0])
    err = rel_error(a, b)
    assert err[0] == 0 and err[1] == math.inf and err[2] < 1e-11 and err[3] == 0


def test_random_operands_include_special_values():
    t, r = random_vbools(np.random.default_rng(0), 10000)
    assert (r == 0).any() and np.isinf(r).any() and t.any() and (~t).any()


@settings(max_examples=50, deadline=None)
@given(st.sampled_from(sorted(law_table())), st.integers(0, 2**31))
def test_every_law_holds_on_fresh_samples(name, seed):
    rng = np.random.default_rng(seed)
    x, y, z = (random_vbools(rng, 500) for _ in range(3))
    assert check_law(law_table()[name], x, y, z, 1e-9)[0] == 0
