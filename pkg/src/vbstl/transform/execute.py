"""Reference executor: runs a block graph sample by sample over a trace."""

from __future__ import annotations

import warnings

import numpy as np

from ..trace import Trace, TraceError
from .graph import BlockGraph
from .templates import get_template, template_params


class DivisionByZeroWarning(RuntimeWarning):
    pass


OPAQUE_FUNCTIONS = {
    "sin": np.sin,
    "cos": np.cos,
    "exp": np.exp,
    "sqrt": lambda x: np.sqrt(x) if x >= 0 else np.nan,
    "square": np.square,
    "sign": np.sign,
    "tanh": np.tanh,
}


def _truth(x: float) -> bool:
    return x != 0


def _switch_on(params, u2: float) -> bool:
    crit = params.get("criterion", "~=0")
    if crit == "~=0":
        return u2 != 0
    thr = float(params["threshold"])
    return u2 >= thr if crit == ">=" else u2 > thr


def execute_graph(graph: BlockGraph, trace: Trace) -> Trace:
    """Simulate ``graph`` on the inport signals of ``trace``.

    Booleans are 1.0/0.0 and any nonzero value reads as true. A unit delay
    outputs its initial value at the first sample. The returned trace holds
    the original signals plus one signal per block, named by block id.
    """
    for b in graph.inports():
        if b.signal not in trace:
            raise TraceError(f"inport {b.id!r} reads missing signal {b.signal!r}")
    delays = {bid for bid, b in graph.blocks.items() if b.kind == "UnitDelay"}
    order = graph.topo_order(delays)
    n = len(trace)
    times = trace.times - trace.times[0]
    out = {bid: np.empty(n) for bid in graph.blocks}
    state = {
        bid: get_template(b.params["name"]).init(template_params(b.params))
        for bid, b in graph.blocks.items() if b.kind == "Template"
    }
    tparams = {bid: template_params(graph.blocks[bid].params) for bid in state}
    div_zero = []
    for k in range(n):
        for bid in order:
            b = graph.blocks[bid]
            ins = [out[s][k] for s in graph.inputs(bid)] if b.kind != "UnitDelay" else None
            p = b.params
            kind = b.kind
            if kind == "Inport":
                v = trace.signal(b.signal)[k]
            elif kind == "Constant":
                v = float(p["value"])
            elif kind == "Relational":
                x, y = ins
                op = p["op"]
                v = {"<": x < y, "<=": x <= y, ">=": x >= y, ">": x > y, "==": x == y}[op]
            elif kind == "Logical":
                bits = [_truth(x) for x in ins]
                op = p["op"]
                v = (not bits[0]) if op == "not" else (all(bits) if op == "and" else any(bits))
            elif kind == "Arithmetic":
                x, y = ins
                op = p["op"]
                if op == "/":
                    if y == 0:
                        div_zero.append((bid, k))
                        v = np.nan
                    else:
                        v = x / y
                else:
                    v = x + y if op == "+" else (x - y if op == "-" else x * y)
            elif kind == "Switch":
                v = ins[0] if _switch_on(p, ins[1]) else ins[2]
            elif kind == "UnitDelay":
                v = float(p.get("init", 0.0)) if k == 0 else out[graph.inputs(bid)[0]][k - 1]
            elif kind == "Abs":
                v = abs(ins[0])
            elif kind == "Template":
                tmpl = get_template(p["name"])
                state[bid], v = tmpl.step(state[bid], _truth(ins[0]), float(times[k]), tparams[bid])
            else:  # Opaque
                v = OPAQUE_FUNCTIONS[p["function"]](ins[0])
            out[bid][k] = float(v)
    if div_zero:
        bid, k = div_zero[0]
        warnings.warn(
            f"division by zero in block {bid!r} at sample {k} ({len(div_zero)} occurrences); "
            "output is NaN",
            DivisionByZeroWarning,
            stacklevel=2,
        )
    extra = {}
    for bid, values in out.items():
        b = graph.blocks[bid]
        if bid in trace:
            if b.kind == "Inport" and b.signal == bid:
                continue
            raise TraceError(f"block id {bid!r} clashes with an input signal name")
        extra[bid] = values
    return trace.with_signals(extra)


def final_output(graph: BlockGraph, trace: Trace) -> bool:
    """Truth of the graph output at the last sample."""
    return bool(execute_graph(graph, trace).signal(graph.output)[-1] != 0)
