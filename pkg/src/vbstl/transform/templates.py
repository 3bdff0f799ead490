"""Temporal templates: stateful Boolean blocks with a known formula.

Each template describes one stateful block three ways: as a formula read at
time 0 that gives the block output at the final sample, as a formula for
the output at sample ``k`` on a known time grid (used when unrolling), and
as a step function for the reference executor.

Templates are used for explicit ``Template`` blocks and for recognising
feedback loops through a unit delay.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Any, Callable, Mapping, Optional, Sequence

from ..stl.ast import Always, Eventually, Formula, conj_all, disj_all
from ..trace import in_window


@dataclass(frozen=True)
class Template:
    name: str
    params: tuple[str, ...]
    anchored: Callable[[Formula, float, Mapping[str, float]], Formula]
    unrolled: Callable[[Sequence[Formula], Sequence[float], int, Mapping[str, float]], Formula]
    init: Callable[[Mapping[str, float]], Any]
    step: Callable[[Any, bool, float, Mapping[str, float]], tuple[Any, bool]]


TEMPLATES: dict[str, Template] = {}


def register_template(t: Template) -> Template:
    TEMPLATES[t.name] = t
    return t


def get_template(name: str) -> Template:
    try:
        return TEMPLATES[name]
    except KeyError:
        raise KeyError(f"unknown template {name!r}") from None


def _latch(combine: bool):
    # running AND (combine=True) or running OR of the input
    def init(_p):
        return combine

    def step(state, value, _t, _p):
        out = (state and value) if combine else (state or value)
        return out, out

    return init, step


register_template(Template(
    "always", (),
    anchored=lambda f, horizon, p: Always(f),
    unrolled=lambda fs, times, k, p: conj_all(list(fs[: k + 1])),
    init=_latch(True)[0], step=_latch(True)[1],
))

register_template(Template(
    "eventually", (),
    anchored=lambda f, horizon, p: Eventually(f),
    unrolled=lambda fs, times, k, p: disj_all(list(fs[: k + 1])),
    init=_latch(False)[0], step=_latch(False)[1],
))


def _within_step(state, value, t, p):
    if in_window(t, p["a"], p["b"]):
        state = state and value
    return state, state


register_template(Template(
    "always_within", ("a", "b"),
    anchored=lambda f, horizon, p: Always(f, p["a"], p["b"]),
    unrolled=lambda fs, times, k, p: conj_all(
        [fs[j] for j in range(k + 1) if in_window(times[j], p["a"], p["b"])]
    ),
    init=lambda p: True, step=_within_step,
))


def _held_step(state, value, t, p):
    state.append((t, value))
    while state and not in_window(state[0][0], t - p["d"], t):
        state.popleft()
    return state, all(v for _, v in state)


register_template(Template(
    "held_for", ("d",),
    anchored=lambda f, horizon, p: Always(f, max(0.0, horizon - p["d"]), horizon),
    unrolled=lambda fs, times, k, p: conj_all(
        [fs[j] for j in range(k + 1) if in_window(times[j], times[k] - p["d"], times[k])]
    ),
    init=lambda p: deque(), step=_held_step,
))


def template_params(block_params: Mapping[str, Any]) -> dict[str, float]:
    t = get_template(block_params["name"])
    missing = [n for n in t.params if n not in block_params]
    if missing:
        raise ValueError(f"template {t.name!r} needs parameters {missing}")
    return {n: float(block_params[n]) for n in t.params}


# Feedback-loop patterns ---------------------------------------------------------

# (logical op, delay initial value must be nonzero, template)
LOOP_PATTERNS: list[tuple[str, bool, str]] = [
    ("and", True, "always"),
    ("or", False, "eventually"),
]


@dataclass(frozen=True)
class LoopMatch:
    latch: str  # the Logical block closing the loop
    delay: str
    source: str  # block feeding the loop from outside
    template: str


def match_template(graph, component: Sequence[str]) -> Optional[LoopMatch]:
    """Recognise a two-block latch ``out = f op delay(out)``.

    Returns ``None`` when the component is not a registered pattern or the
    delay's initial value is not the one the pattern needs.
    """
    if len(component) != 2:
        return None
    blocks = [graph.blocks[b] for b in component]
    delays = [b for b in blocks if b.kind == "UnitDelay"]
    logic = [b for b in blocks if b.kind == "Logical"]
    if len(delays) != 1 or len(logic) != 1:
        return None
    delay, latch = delays[0], logic[0]
    ins = graph.inputs(latch.id)
    if len(ins) != 2 or graph.inputs(delay.id) != [latch.id] or ins.count(delay.id) != 1:
        return None
    source = ins[0] if ins[1] == delay.id else ins[1]
    if source in component:
        return None
    init_nonzero = float(delay.params.get("init", 0.0)) != 0.0
    for op, needs_nonzero, name in LOOP_PATTERNS:
        if latch.params["op"] == op and init_nonzero == needs_nonzero:
            return LoopMatch(latch.id, delay.id, source, name)
    return None
