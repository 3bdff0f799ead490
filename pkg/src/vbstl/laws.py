"""Randomised checks of the algebraic laws of the VBool connectives.

Each law is an identity between two expressions over operands ``x, y, z``.
Operands are drawn as arrays of truth values and robustness values (mostly
log-uniform over twelve decades, with occasional 0 and infinity) and both
sides are evaluated with the array connectives, so ``1e5`` triples take
well under a second.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .vbool import ADD, MAX, and_arr, or_arr, parallel_arr

Arr = tuple[np.ndarray, np.ndarray]


@dataclass(frozen=True)
class LawResult:
    name: str
    cases: int
    failures: int
    worst_error: float

    @property
    def ok(self) -> bool:
        return self.failures == 0


def random_vbools(rng: np.random.Generator, n: int, special: float = 0.05) -> Arr:
    """``n`` random VBools; a fraction ``special`` each has robustness 0 or infinity."""
    truth = rng.random(n) < 0.5
    rob = 10.0 ** rng.uniform(-6.0, 6.0, n)
    u = rng.random(n)
    rob[u < special] = 0.0
    rob[(u >= special) & (u < 2 * special)] = np.inf
    return truth, rob


def rel_error(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Relative difference, 0 for equal infinities and inf for unequal ones."""
    both_inf = np.isinf(a) & np.isinf(b)
    with np.errstate(invalid="ignore"):
        err = np.abs(a - b) / np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    err = np.where(both_inf, 0.0, err)
    return np.where(np.isinf(a) ^ np.isinf(b), np.inf, err)


def _not(x: Arr) -> Arr:
    return ~x[0], x[1]


def _and(sem):
    return lambda x, y: and_arr(sem, x[0], x[1], y[0], y[1])


def _or(sem):
    return lambda x, y: or_arr(sem, x[0], x[1], y[0], y[1])


def _const(truth: bool, rob: float, like: Arr) -> Arr:
    n = like[0].size
    return np.full(n, truth), np.full(n, rob)


Law = Callable[[Arr, Arr, Arr], tuple[Arr, Arr]]


def law_table() -> dict[str, Law]:
    laws: dict[str, Law] = {}
    for sem in (MAX, ADD):
        a, o = _and(sem), _or(sem)
        tag = "max" if sem == MAX else "add"
        laws[f"and_{tag} associativity"] = lambda x, y, z, a=a: (a(a(x, y), z), a(x, a(y, z)))
        laws[f"and_{tag} commutativity"] = lambda x, y, z, a=a: (a(x, y), a(y, x))
        laws[f"and_{tag} identity"] = lambda x, y, z, a=a: (a(x, _const(True, np.inf, x)), x)
        laws[f"and_{tag} zero"] = lambda x, y, z, a=a: (
            a(x, _const(False, np.inf, x)), _const(False, np.inf, x))
        laws[f"and_{tag} De Morgan"] = lambda x, y, z, a=a, o=o: (_not(a(x, y)), o(_not(x), _not(y)))
        laws[f"or_{tag} De Morgan"] = lambda x, y, z, a=a, o=o: (_not(o(x, y)), a(_not(x), _not(y)))
    a, o = _and(MAX), _or(MAX)
    laws["and_max idempotence"] = lambda x, y, z: (a(x, x), x)
    laws["and_max distributivity over or_max"] = lambda x, y, z: (a(x, o(y, z)), o(a(x, y), a(x, z)))
    laws["or_max distributivity over and_max"] = lambda x, y, z: (o(x, a(y, z)), a(o(x, y), o(x, z)))
    add = _and(ADD)

    def halving(x, y, z):
        # (T, r) and (T, r) = (T, r/2); (F, r) and (F, r) = (F, 2r)
        t, r = x
        return add(x, x), (t, np.where(t, r / 2, 2 * r))

    laws["and_add idempotence counterexample"] = halving
    return laws


def check_law(law: Law, x: Arr, y: Arr, z: Arr, tol: float) -> tuple[int, float]:
    (t1, r1), (t2, r2) = law(x, y, z)
    err = rel_error(np.asarray(r1, float), np.asarray(r2, float))
    bad = (np.asarray(t1) != np.asarray(t2)) | (err > tol)
    worst = float(np.max(np.where(np.asarray(t1) != np.asarray(t2), np.inf, err))) if err.size else 0.0
    return int(bad.sum()), worst


def check_parallel_bound(rng: np.random.Generator, n: int) -> LawResult:
    """``parallel(x, y) < min(x, y)`` for positive finite operands.

    ``worst_error`` is the largest ``parallel - min``, negative when the bound
    holds everywhere. Operands span twelve decades: once the ratio of the two
    exceeds about ``2**53`` the result rounds to the smaller operand.
    """
    x = 10.0 ** rng.uniform(-6.0, 6.0, n)
    y = 10.0 ** rng.uniform(-6.0, 6.0, n)
    margin = np.minimum(x, y) - parallel_arr(x, y)
    return LawResult("parallel bound", n, int((margin <= 0).sum()), float(-margin.min()))


def check_laws(n: int = 100_000, seed: int = 0, tol: float = 1e-9) -> list[LawResult]:
    rng = np.random.default_rng(seed)
    x, y, z = (random_vbools(rng, n) for _ in range(3))
    results = []
    for name, law in law_table().items():
        failures, worst = check_law(law, x, y, z, tol)
        results.append(LawResult(name, n, failures, worst))
    results.append(check_parallel_bound(rng, n))
    return results
