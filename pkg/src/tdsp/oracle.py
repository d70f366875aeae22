"""Brute-force ground truth: label-setting time-dependent Dijkstra.

Keys are arrival times; under FIFO the first settlement of a vertex is final.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass

import numpy as np

from .errors import Unreachable, UnknownVertex
from .graph import TDGraph
from .plf import PLF


@dataclass(frozen=True)
class OraclePath:
    cost: float
    vertices: list[int]


@dataclass(frozen=True)
class ProfileReport:
    max_error: float
    first_failure: float | None
    samples: int

    @property
    def ok(self) -> bool:
        return self.first_failure is None


def _arrivals(g: TDGraph, s: int, t: float, target: int | None = None):
    arrive = {s: t}
    pred: dict[int, int] = {}
    done = set()
    heap = [(t, s)]
    while heap:
        a, u = heapq.heappop(heap)
        if u in done:
            continue
        done.add(u)
        if u == target:
            break
        for v, w in g.out[u].items():
            if v in done:
                continue
            b = a + w(a)
            if b < arrive.get(v, math.inf):
                arrive[v] = b
                pred[v] = u
                heapq.heappush(heap, (b, v))
    return arrive, pred


def _check(g: TDGraph, *vs: int) -> None:
    for v in vs:
        if not 1 <= v <= g.n:
            raise UnknownVertex(f"vertex {v} outside 1..{g.n}")


def td_dijkstra(g: TDGraph, s: int, d: int, t: float) -> OraclePath:
    """Minimum-cost path from ``s`` to ``d`` departing at ``t``."""
    _check(g, s, d)
    if s == d:
        return OraclePath(0.0, [s])
    arrive, pred = _arrivals(g, s, t, d)
    if d not in arrive:
        raise Unreachable(f"{d} is not reachable from {s}")
    path = [d]
    while path[-1] != s:
        path.append(pred[path[-1]])
    path.reverse()
    return OraclePath(arrive[d] - t, path)


def td_costs_from(g: TDGraph, s: int, t: float) -> dict[int, float]:
    """Costs from ``s`` at departure ``t`` to every reachable vertex."""
    _check(g, s)
    arrive, _ = _arrivals(g, s, t)
    return {v: a - t for v, a in arrive.items()}


def path_cost(g: TDGraph, path: list[int], t: float) -> float:
    """Chain-evaluate the edges of ``path`` departing at ``t``."""
    now = t
    for u, v in zip(path, path[1:]):
        now += g.weight(u, v)(now)
    return now - t


def validate_profile(g: TDGraph, s: int, d: int, f: PLF, samples: int = 1024,
                     tol: float = 1e-6) -> ProfileReport:
    """Compare ``f`` against the oracle at ``samples`` evenly spaced times."""
    if samples < 1:
        raise ValueError("samples must be positive")
    lo, hi = g.domain
    worst = 0.0
    first = None
    for t in np.linspace(lo, hi, samples, endpoint=False).tolist():
        try:
            truth = td_dijkstra(g, s, d, t).cost
        except Unreachable:
            truth = math.inf
        got = f(t)
        err = 0.0 if got == truth else abs(got - truth)
        worst = max(worst, err)
        if first is None and err > tol:
            first = t
    return ProfileReport(worst, first, samples)
