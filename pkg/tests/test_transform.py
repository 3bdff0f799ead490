import warnings

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from vbstl.stl import Always, Const, Not, Predicate, TRUE, Var, bool_sat, format_formula, operator_count, parse_stl
from vbstl.trace import Trace, TraceError
from vbstl.transform import (
    AlgebraicLoopError, FormulaTable, GraphError, LargeFormulaWarning, SignalTable, TableSizeError,
    TemplateMismatchError, combine_binary, execute_graph, final_output, flatten_table, load_graph,
    match_template, s2f, translate, translate_switch,
)
from vbstl.transform.graph import graph_from_dict

from conftest import DATA
from graphgen import build

P = parse_stl


def fixture(name, log=None):
    g = load_graph(DATA / "graphs" / f"{name}.json")
    return g if log is None else g.with_log(log)


def sig(name, value):
    return SignalTable(((TRUE, Const(float(value)) if isinstance(value, (int, float)) else Var(value)),))


def ftab(*pairs):
    return FormulaTable(tuple((P(a) if isinstance(a, str) else a, P(c)) for a, c in pairs))


# tables ---------------------------------------------------------------------------


def test_single_entry_product_stays_single():
    t = combine_binary("<", sig("a", "w"), sig("b", 5000))
    assert t.entries == ((TRUE, P("w < 5000")),)


def test_product_entry_count():
    a = ftab(("p > 0", "x > 0"), ("not (p > 0)", "x > 1"))
    b = ftab(("q > 0", "y > 0"), ("q > 1", "y > 1"), ("q > 2", "y > 2"))
    t = combine_binary("and", a, b)
    assert len(t) == 6
    assert (P("(p > 0) and (q > 1)"), P("(x > 0) and (y > 1)")) in t.entries


def test_product_respects_limit():
    a = ftab(*[(f"p > {i}", "x > 0") for i in range(10)])
    with pytest.raises(TableSizeError):
        combine_binary("or", a, a, limit=50)


def test_operand_kinds_are_checked():
    with pytest.raises(TypeError):
        combine_binary("and", sig("a", "w"), sig("b", 1))
    with pytest.raises(TypeError):
        combine_binary("<", ftab((TRUE, "x > 0")), sig("b", 1))


def test_switch_gives_gear_table():
    cond = ftab((TRUE, "gear < 3"))
    t = translate_switch(cond, sig("c50", 50), sig("c200", 200))
    assert t.entries == ((P("gear < 3"), Const(50.0)), (P("not (gear < 3)"), Const(200.0)))


def test_switch_entry_count():
    cond = ftab(("p > 0", "g < 3"), ("not (p > 0)", "g < 4"))
    in3 = SignalTable(((P("q > 0"), Var("a")), (P("not (q > 0)"), Var("b"))))
    assert len(translate_switch(cond, sig("c", 1), in3)) == 6


TABLE3 = ftab(("gear < 3", "(w < 5000) and (v < 50)"), ("not (gear < 3)", "(w < 5000) and (v < 200)"))


def test_flatten_disjunctive():
    assert flatten_table(TABLE3, "disjunctive") == P(
        "((gear < 3) and ((w < 5000) and (v < 50))) or ((not (gear < 3)) and ((w < 5000) and (v < 200)))"
    )


def test_flatten_implicative():
    assert flatten_table(TABLE3, "implicative") == P(
        "((gear < 3) => ((w < 5000) and (v < 50))) and ((not (gear < 3)) => ((w < 5000) and (v < 200)))"
    )


def test_flatten_single_true_entry_is_identity():
    assert flatten_table(ftab((TRUE, "x > 0"))) == P("x > 0")


@pytest.mark.parametrize("consequent,expected", [
    (Const(50.0), "not (50 == 0)"),
    (Const(0.0), "not (0 == 0)"),
    (Var("x"), "not (x == 0)"),
])
def test_signal_to_formula(consequent, expected):
    t = s2f(SignalTable(((P("p > 0"), consequent),)))
    assert t.entries == ((P("p > 0"), P(expected)),)


# whole-graph translation ----------------------------------------------------------


def test_gear_switch_formula():
    tr = translate(fixture("fig3_gear_switch"), horizon=10.0)
    assert tr.formula == Always(flatten_table(TABLE3))
    assert tr.manifest == ()


def test_speed_limits_without_logging():
    tr = translate(fixture("fig2_speed_limits"))
    assert tr.formula == P("(w < 4500) and (v < 120)")
    assert not tr.anchored


def test_speed_limits_with_output_logged():
    tr = translate(fixture("fig2_speed_limits", ["sig7"]))
    assert tr.formula == Not(Predicate(Var("sig7"), "==", Const(0.0)))
    assert [(m.signal, m.reason) for m in tr.manifest] == [("sig7", "forced")]


def test_speed_limits_with_relation_logged():
    tr = translate(fixture("fig2_speed_limits", ["sig3"]))
    assert tr.formula == P("(not (sig3 == 0)) and (v < 120)")


def test_always_latch_template():
    tr = translate(fixture("fig1_always_latch"), horizon=4.0)
    assert tr.formula == P("alw (w < 4500)")
    assert tr.anchored and tr.final_formula is tr.formula


def test_pointwise_final_reading():
    tr = translate(fixture("fig2_speed_limits"), horizon=3.0)
    assert tr.final_formula == P("ev_[3,3] ((w < 4500) and (v < 120))")
    with pytest.raises(ValueError):
        translate(fixture("fig2_speed_limits")).final_formula


def _adder_graph(extra=()):
    return build(
        [("x", "Inport", {}), ("y", "Inport", {}), ("zero", "Constant", {"value": 0}),
         ("ten", "Constant", {"value": 10}), ("gt", "Relational", {"op": ">"}),
         ("lt", "Relational", {"op": "<"}), ("sum", "Arithmetic", {"op": "+"}),
         ("one", "Constant", {"value": 1}), ("out", "Relational", {"op": ">="}), *extra],
        [("x", "gt", 1), ("zero", "gt", 2), ("y", "lt", 1), ("ten", "lt", 2),
         ("gt", "sum", 1), ("lt", "sum", 2), ("sum", "out", 1), ("one", "out", 2)],
        "out",
    )


def test_formula_used_as_signal_is_logged():
    tr = translate(_adder_graph())
    assert tr.formula == P("sum >= 1")
    assert [(m.signal, m.reason) for m in tr.manifest] == [("sum", "formula-as-signal")]


def test_opaque_block_is_logged():
    g = build(
        [("x", "Inport", {}), ("f", "Opaque", {"function": "sin"}), ("c", "Constant", {"value": 0.5}),
         ("out", "Relational", {"op": "<"})],
        [("x", "f", 1), ("f", "out", 1), ("c", "out", 2)],
        "out",
    )
    tr = translate(g)
    assert tr.formula == P("f < 0.5")
    assert [(m.signal, m.reason) for m in tr.manifest] == [("f", "inexpressible-block")]
    t = Trace.uniform({"x": [0.0, 1.0, 2.0]})
    ex = execute_graph(g, t)
    assert ex.signal("f").tolist() == pytest.approx(np.sin([0.0, 1.0, 2.0]).tolist())


# loops ----------------------------------------------------------------------------


def _latch(op, init):
    return build(
        [("x", "Inport", {}), ("c", "Constant", {"value": 0}), ("rel", "Relational", {"op": ">"}),
         ("latch", "Logical", {"op": op}), ("prev", "UnitDelay", {"init": init})],
        [("x", "rel", 1), ("c", "rel", 2), ("rel", "latch", 1), ("prev", "latch", 2), ("latch", "prev", 1)],
        "latch",
    )


def _two_delay_loop():
    return build(
        [("x", "Inport", {}), ("c", "Constant", {"value": 0}), ("rel", "Relational", {"op": ">"}),
         ("latch", "Logical", {"op": "and"}), ("d1", "UnitDelay", {"init": 1}),
         ("d2", "UnitDelay", {"init": 1})],
        [("x", "rel", 1), ("c", "rel", 2), ("rel", "latch", 1), ("d2", "latch", 2),
         ("latch", "d1", 1), ("d1", "d2", 1)],
        "latch",
    )


def test_or_latch_matches_eventually():
    tr = translate(_latch("or", 0), horizon=3.0)
    assert tr.formula == P("ev (x > 0)")


def test_unmatched_loop():
    g = _two_delay_loop()
    comp = next(c for c in g.sccs() if len(c) > 1)
    assert match_template(g, comp) is None
    with pytest.raises(TemplateMismatchError):
        translate(g, horizon=3.0, mode="templates")
    tr = translate(g, horizon=3.0)
    assert {m.reason for m in tr.manifest} == {"recursive-loop"}


def test_blackbox_mode_logs_loop():
    tr = translate(fixture("fig1_always_latch"), horizon=3.0, mode="blackbox")
    assert tr.formula == P("(w < 4500) and (not (prev == 0))")
    assert tr.logged_signals == ["prev"]


def test_algebraic_loop_rejected():
    g = build(
        [("x", "Inport", {}), ("a", "Logical", {"op": "and"}), ("b", "Logical", {"op": "not"})],
        [("x", "a", 1), ("b", "a", 2), ("a", "b", 1)],
        "a",
    )
    with pytest.raises(AlgebraicLoopError):
        translate(g)


def test_unroll_three_samples():
    tr = translate(fixture("fig1_always_latch"), horizon=2.0, mode="unroll", n_samples=3)
    assert sorted(format_formula(x) for x in _conjuncts(tr.formula)) == [
        "w < 4500", "w(t+1) < 4500", "w(t+2) < 4500"
    ]


def _conjuncts(f):
    from vbstl.stl import And

    return _conjuncts(f.left) + _conjuncts(f.right) if isinstance(f, And) else [f]


def test_unroll_single_sample_is_body():
    tr = translate(fixture("fig1_always_latch"), horizon=0.0, mode="unroll", n_samples=1)
    assert tr.formula == P("w < 4500")


def test_unroll_long_horizon_warns():
    with pytest.warns(LargeFormulaWarning):
        tr = translate(fixture("fig1_always_latch"), horizon=10.0, mode="unroll", n_samples=1001)
    assert len(_conjuncts(tr.formula)) == 1001
    assert operator_count(tr.formula) >= 1000


def test_unroll_needs_samples_and_horizon():
    with pytest.raises(ValueError):
        translate(fixture("fig1_always_latch"), horizon=1.0, mode="unroll")
    with pytest.raises(ValueError):
        translate(fixture("fig1_always_latch"), mode="unroll", n_samples=3)


# execution ------------------------------------------------------------------------


@pytest.mark.parametrize("w,expected", [
    ([4000.0] * 5, [1, 1, 1, 1, 1]),
    ([4000.0, 5000.0, 4000.0], [1, 0, 0]),
])
def test_latch_execution(w, expected):
    ex = execute_graph(fixture("fig1_always_latch"), Trace.uniform({"w": w}))
    assert ex.signal("req").tolist() == expected


def test_switch_execution_selects_first_input():
    g = fixture("fig3_gear_switch")
    ex = execute_graph(g, Trace.uniform({"gear": [1, 2, 1], "v": [0, 0, 0], "w": [0, 0, 0]}))
    assert ex.signal("sub1").tolist() == [50, 50, 50]


def test_execution_needs_inports():
    with pytest.raises(TraceError):
        execute_graph(fixture("fig1_always_latch"), Trace.uniform({"v": [1.0]}))


def test_graph_document_errors():
    with pytest.raises(GraphError):
        graph_from_dict({"blocks": [{"id": "a", "kind": "Inport"}, {"id": "a", "kind": "Inport"}], "output": "a"})
    with pytest.raises(GraphError):
        graph_from_dict({"blocks": [{"id": "a", "kind": "Nonsense"}], "output": "a"})
    with pytest.raises(GraphError):
        graph_from_dict({"blocks": []})


# equivalence properties -----------------------------------------------------------

values = st.sampled_from([-1.0, 0.0, 1.0, 4000.0, 4500.0, 5000.0])


def _template_graph(name, **params):
    return build(
        [("x", "Inport", {}), ("c", "Constant", {"value": 0}), ("rel", "Relational", {"op": ">"}),
         ("tm", "Template", {"name": name, **params})],
        [("x", "rel", 1), ("c", "rel", 2), ("rel", "tm", 1)],
        "tm",
    )


GRAPHS = {
    "and-latch": _latch("and", 1),
    "or-latch": _latch("or", 0),
    "two-delay": _two_delay_loop(),
    "always-template": _template_graph("always"),
    "eventually-template": _template_graph("eventually"),
    "always-within": _template_graph("always_within", a=1, b=2),
    "held-for": _template_graph("held_for", d=1.5),
    "adder": _adder_graph(),
}


@settings(max_examples=60, deadline=None)
@given(st.sampled_from(sorted(GRAPHS)), st.lists(values, min_size=1, max_size=7), st.sampled_from(["auto", "unroll"]),
       st.sampled_from([0.5, 1.0]))
def test_translation_agrees_with_execution(name, xs, mode, dt):
    g = GRAPHS[name]
    trace = Trace.uniform({"x": xs, "y": xs[::-1]}, dt=dt)
    horizon = dt * (len(xs) - 1)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", LargeFormulaWarning)
        tr = translate(g, horizon=horizon, mode=mode, n_samples=len(xs))
    ex = execute_graph(g, trace)
    assert bool_sat(tr.final_formula, ex, 0) == final_output(g, trace)


@settings(max_examples=60, deadline=None)
@given(st.lists(values, min_size=1, max_size=6), st.sampled_from(["implicative", "disjunctive"]))
def test_encodings_agree(ws, encoding):
    g = fixture("fig3_gear_switch")
    trace = Trace.uniform({"gear": [1 + abs(w) % 4 for w in ws], "v": [100.0] * len(ws), "w": ws})
    tr = translate(g, horizon=len(ws) - 1.0, encoding=encoding)
    assert bool_sat(tr.final_formula, execute_graph(g, trace), 0) == final_output(g, trace)
