"""Causal signal-block graphs and their JSON interchange format.

A graph document looks like::

    {"blocks": [{"id": "limit", "kind": "Constant", "params": {"value": 4500}}, ...],
     "wires": [{"from": ["omega", 1], "to": ["below", 1]}, ...],
     "output": "req",
     "log": ["prev"]}

Every block has a single output (port 1) and numbered input ports starting
at 1. Block ids double as signal names for logged outputs, so they must be
identifiers.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Mapping

from ..stl.syntax import KEYWORDS


class GraphError(ValueError):
    pass


class AlgebraicLoopError(GraphError):
    pass


RELATIONAL_OPS = ("<", "<=", ">=", ">", "==")
LOGICAL_OPS = ("and", "or", "not")
ARITHMETIC_OPS = ("+", "-", "*", "/")
SWITCH_CRITERIA = (">=", ">", "~=0")
KINDS = (
    "Inport", "Constant", "Relational", "Logical", "Arithmetic", "Switch", "UnitDelay", "Abs",
    "Template", "Opaque",
)
_IDENT = re.compile(r"^[A-Za-z_][A-Za-z0-9_]*$")


@dataclass(frozen=True)
class Block:
    id: str
    kind: str
    params: Mapping[str, Any] = field(default_factory=dict)

    @property
    def n_inputs(self) -> int:
        k = self.kind
        if k in ("Inport", "Constant"):
            return 0
        if k in ("Relational", "Arithmetic"):
            return 2
        if k == "Logical":
            return 1 if self.params["op"] == "not" else int(self.params.get("inputs", 2))
        if k == "Switch":
            return 3
        return 1  # UnitDelay, Abs, Template, Opaque

    @property
    def signal(self) -> str:
        """Trace signal read by an Inport."""
        return str(self.params.get("signal", self.id))


@dataclass(frozen=True)
class Wire:
    src: str
    dst: str
    port: int
    src_port: int = 1


@dataclass
class BlockGraph:
    blocks: dict[str, Block]
    wires: list[Wire]
    output: str
    log: list[str] = field(default_factory=list)

    def __post_init__(self):
        self._inputs: dict[str, list[str]] = {}
        self.validate()

    # structure -------------------------------------------------------------

    def validate(self) -> None:
        from .templates import TEMPLATES
        from .execute import OPAQUE_FUNCTIONS

        for bid, b in self.blocks.items():
            if bid != b.id:
                raise GraphError(f"block key {bid!r} does not match its id {b.id!r}")
            if not _IDENT.match(bid) or bid in KEYWORDS or bid in ("alw_", "ev_", "until_", "t"):
                raise GraphError(f"block id {bid!r} must be an identifier and not a keyword")
            if b.kind not in KINDS:
                raise GraphError(f"block {bid!r}: unknown block kind {b.kind!r}")
            p = b.params
            if b.kind == "Constant" and "value" not in p:
                raise GraphError(f"Constant block {bid!r} needs a 'value'")
            if b.kind == "Relational" and p.get("op") not in RELATIONAL_OPS:
                raise GraphError(f"Relational block {bid!r}: op must be one of {RELATIONAL_OPS}")
            if b.kind == "Logical":
                if p.get("op") not in LOGICAL_OPS:
                    raise GraphError(f"Logical block {bid!r}: op must be one of {LOGICAL_OPS}")
                if p["op"] != "not" and int(p.get("inputs", 2)) < 2:
                    raise GraphError(f"Logical block {bid!r} needs at least two inputs")
            if b.kind == "Arithmetic" and p.get("op") not in ARITHMETIC_OPS:
                raise GraphError(f"Arithmetic block {bid!r}: op must be one of {ARITHMETIC_OPS}")
            if b.kind == "Switch":
                if p.get("criterion", "~=0") not in SWITCH_CRITERIA:
                    raise GraphError(f"Switch block {bid!r}: criterion must be one of {SWITCH_CRITERIA}")
                if p.get("criterion", "~=0") != "~=0" and "threshold" not in p:
                    raise GraphError(f"Switch block {bid!r} needs a 'threshold'")
            if b.kind == "Template" and p.get("name") not in TEMPLATES:
                raise GraphError(f"Template block {bid!r}: unknown template {p.get('name')!r}")
            if b.kind == "Opaque" and p.get("function") not in OPAQUE_FUNCTIONS:
                raise GraphError(f"Opaque block {bid!r}: unknown function {p.get('function')!r}")
        if self.output not in self.blocks:
            raise GraphError(f"output block {self.output!r} does not exist")
        for name in self.log:
            if name not in self.blocks:
                raise GraphError(f"logged block {name!r} does not exist")
        ports: dict[str, dict[int, str]] = {bid: {} for bid in self.blocks}
        for w in self.wires:
            if w.src not in self.blocks:
                raise GraphError(f"wire source {w.src!r} does not exist")
            if w.dst not in self.blocks:
                raise GraphError(f"wire destination {w.dst!r} does not exist")
            if w.src_port != 1:
                raise GraphError(f"block {w.src!r} has a single output port")
            n = self.blocks[w.dst].n_inputs
            if not 1 <= w.port <= n:
                raise GraphError(f"block {w.dst!r} has no input port {w.port}")
            if w.port in ports[w.dst]:
                raise GraphError(f"input port {w.port} of {w.dst!r} is wired twice")
            ports[w.dst][w.port] = w.src
        for bid, b in self.blocks.items():
            missing = [i for i in range(1, b.n_inputs + 1) if i not in ports[bid]]
            if missing:
                raise GraphError(f"block {bid!r}: input ports {missing} are not connected")
            self._inputs[bid] = [ports[bid][i] for i in range(1, b.n_inputs + 1)]

    def inputs(self, bid: str) -> list[str]:
        """Source block ids ordered by input port."""
        return self._inputs[bid]

    def consumers(self, bid: str) -> list[str]:
        return [d for d in self.blocks if bid in self._inputs[d]]

    def inports(self) -> list[Block]:
        return [b for b in self.blocks.values() if b.kind == "Inport"]

    def sccs(self, cut: frozenset[str] | set[str] = frozenset()) -> list[list[str]]:
        """Strongly connected components, ignoring the inputs of blocks in ``cut``.

        Components come out in dependency order (sources first).
        """
        succ: dict[str, list[str]] = {b: [] for b in self.blocks}
        for dst, srcs in self._inputs.items():
            if dst in cut:
                continue
            for s in srcs:
                succ[s].append(dst)
        return _tarjan(list(self.blocks), succ)[::-1]

    def cyclic(self, component: list[str], cut: frozenset[str] | set[str] = frozenset()) -> bool:
        if len(component) > 1:
            return True
        b = component[0]
        return b not in cut and b in self._inputs[b]

    def topo_order(self, cut: set[str]) -> list[str]:
        """Evaluation order where the inputs of ``cut`` blocks are ignored."""
        order = []
        for comp in self.sccs(frozenset(cut)):
            if self.cyclic(comp, frozenset(cut)):
                raise AlgebraicLoopError(f"algebraic loop through blocks {sorted(comp)}")
            order.extend(comp)
        return order

    # interchange -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "blocks": [{"id": b.id, "kind": b.kind, "params": dict(b.params)} for b in self.blocks.values()],
            "wires": [{"from": [w.src, w.src_port], "to": [w.dst, w.port]} for w in self.wires],
            "output": self.output,
            "log": list(self.log),
        }

    def with_log(self, log: list[str]) -> "BlockGraph":
        return BlockGraph(dict(self.blocks), list(self.wires), self.output, list(log))


def _tarjan(nodes: list[str], succ: Mapping[str, list[str]]) -> list[list[str]]:
    """Iterative Tarjan; returns components in reverse topological order."""
    index: dict[str, int] = {}
    low: dict[str, int] = {}
    on_stack: set[str] = set()
    stack: list[str] = []
    out: list[list[str]] = []
    counter = 0
    for root in nodes:
        if root in index:
            continue
        work = [(root, 0)]
        while work:
            v, i = work.pop()
            if i == 0:
                index[v] = low[v] = counter
                counter += 1
                stack.append(v)
                on_stack.add(v)
            recurse = False
            children = succ[v]
            while i < len(children):
                w = children[i]
                i += 1
                if w not in index:
                    work.append((v, i))
                    work.append((w, 0))
                    recurse = True
                    break
                if w in on_stack:
                    low[v] = min(low[v], index[w])
            if recurse:
                continue
            if low[v] == index[v]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack.discard(w)
                    comp.append(w)
                    if w == v:
                        break
                out.append(sorted(comp, key=nodes.index))
            if work:
                parent = work[-1][0]
                low[parent] = min(low[parent], low[v])
    return out


def graph_from_dict(doc: Mapping[str, Any]) -> BlockGraph:
    try:
        blocks = {}
        for entry in doc["blocks"]:
            b = Block(str(entry["id"]), str(entry["kind"]), dict(entry.get("params", {})))
            if b.id in blocks:
                raise GraphError(f"duplicate block id {b.id!r}")
            blocks[b.id] = b
        wires = []
        for entry in doc.get("wires", []):
            (src, sp), (dst, dp) = entry["from"], entry["to"]
            wires.append(Wire(str(src), str(dst), int(dp), int(sp)))
        return BlockGraph(blocks, wires, str(doc["output"]), [str(x) for x in doc.get("log", [])])
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, GraphError):
            raise
        raise GraphError(f"malformed graph document: {exc}") from None


def load_graph(path: str | Path) -> BlockGraph:
    return graph_from_dict(json.loads(Path(path).read_text(encoding="utf-8")))
