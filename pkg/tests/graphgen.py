"""Random block graphs and inport traces for the translation tests."""

from __future__ import annotations

import numpy as np

from vbstl.trace import Trace
from vbstl.transform import Block, BlockGraph, Wire


def constants(graph: BlockGraph) -> list[float]:
    out = [float(b.params["value"]) for b in graph.blocks.values() if b.kind == "Constant"]
    out += [float(b.params["threshold"]) for b in graph.blocks.values()
            if b.kind == "Switch" and "threshold" in b.params]
    return out


def random_inputs(graph: BlockGraph, rng: np.random.Generator, n: int, dt: float = 1.0) -> Trace:
    """Inport signals whose values sit on, just below and just above the graph's constants."""
    pool = {0.0, 1.0, -1.0}
    for c in constants(graph):
        pool |= {c - 1.0, c, c + 1.0, c - 0.5, c + 0.5}
    pool = np.array(sorted(pool))
    names = sorted({b.signal for b in graph.inports()})
    return Trace(dt * np.arange(n), {s: rng.choice(pool, n) for s in names})


def random_graph(rng: np.random.Generator, n_ops: int = 6) -> BlockGraph:
    """An acyclic graph mixing Switch, Relational, Arithmetic and Logical blocks.

    Signal-valued and formula-valued blocks are kept apart so no block output
    has to be logged; every table size then follows from the closed forms.
    """
    blocks: dict[str, Block] = {}
    wires: list[Wire] = []
    signals: list[str] = []
    formulas: list[str] = []

    def add(kind, params, ins=()):
        bid = f"b{len(blocks)}"
        blocks[bid] = Block(bid, kind, params)
        for port, src in enumerate(ins, start=1):
            wires.append(Wire(src, bid, port))
        return bid

    for name in ("x", "y", "z"):
        signals.append(add("Inport", {"signal": name}))
    for value in (0.0, 1.0):
        signals.append(add("Constant", {"value": value}))
    formulas.append(add("Relational", {"op": "<"}, (signals[0], signals[3])))

    pick = lambda pool: pool[rng.integers(len(pool))]  # noqa: E731
    for _ in range(n_ops):
        r = rng.random()
        if r < 0.35:
            if rng.random() < 0.5:
                ins = (pick(signals), pick(formulas), pick(signals))
                signals.append(add("Switch", {"criterion": "~=0"}, ins))
            else:
                ins = (pick(signals), pick(signals), pick(signals))
                signals.append(add("Switch", {"criterion": ">=", "threshold": 0.5}, ins))
        elif r < 0.55:
            op = ("+", "-", "*")[rng.integers(3)]
            signals.append(add("Arithmetic", {"op": op}, (pick(signals), pick(signals))))
        elif r < 0.8:
            op = ("<", "<=", ">=", ">")[rng.integers(4)]
            formulas.append(add("Relational", {"op": op}, (pick(signals), pick(signals))))
        else:
            op = ("and", "or")[rng.integers(2)]
            formulas.append(add("Logical", {"op": op}, (pick(formulas), pick(formulas))))
    # the output combines the last formula with a comparison on the last signal
    last = add("Relational", {"op": ">="}, (signals[-1], signals[3]))
    out = add("Logical", {"op": "and"}, (formulas[-1], last))
    return BlockGraph(blocks, wires, out)


def expected_sizes(graph: BlockGraph) -> dict[str, int]:
    """Table entry counts from the closed forms, without translating."""
    size: dict[str, int] = {}
    for bid in graph.topo_order(set()):
        b = graph.blocks[bid]
        ins = [size[s] for s in graph.inputs(bid)]
        if b.kind in ("Inport", "Constant"):
            size[bid] = 1
        elif b.kind == "Switch":
            a1, a2, a3 = ins
            size[bid] = a2 * (a1 + a3)
        else:
            size[bid] = int(np.prod(ins))
    return size


def build(blocks, wires, output, log=()) -> BlockGraph:
    """Graph from ``(id, kind, params)`` blocks and ``(src, dst, port)`` wires."""
    return BlockGraph(
        {bid: Block(bid, kind, params) for bid, kind, params in blocks},
        [Wire(src, dst, port) for src, dst, port in wires],
        output,
        list(log),
    )
