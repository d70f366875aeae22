"""Query workloads and the timing harness."""
from __future__ import annotations

import csv
import math
import os
import statistics
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass
from typing import IO, Iterable, Sequence

import numpy as np

from .decomposition import TreeDecomposition
from .errors import Unreachable
from .graph import DAY, Query, TDGraph, diurnal_plf
from .oracle import td_dijkstra
from .query import basic_query
from .shortcut_query import query_with_shortcuts
from .shortcuts import SelectionResult

CSV_COLUMNS = ["method", "query_id", "s", "d", "t", "mode", "median_us", "mean_us", "cost",
               "correct"]
THREADS_ENV = "TDSP_THREADS"
CORRECT_TOL = 1e-6


@dataclass
class BenchRecord:
    method: str
    query_id: int
    s: int
    d: int
    t: float
    mode: str
    median_us: float
    mean_us: float
    cost: float
    correct: bool | None


def default_threads() -> int:
    try:
        return max(1, int(os.environ.get(THREADS_ENV, "1")))
    except ValueError:
        return 1


def gen_queries(n: int, pairs: int, intervals: int, seed: int = 0,
                domain: tuple[float, float] = DAY) -> list[Query]:
    """``pairs`` random vertex pairs, each departing once in every interval.

    The day is cut into ``intervals`` equal slices and one departure time is
    drawn uniformly inside each slice.
    """
    if pairs < 1 or intervals < 1:
        raise ValueError("pairs and intervals must be positive")
    if n < 2:
        raise ValueError("need at least two vertices")
    rng = np.random.default_rng(seed)
    lo, hi = domain
    span = (hi - lo) / intervals
    out = []
    for _ in range(pairs):
        s, d = (int(x) + 1 for x in rng.choice(n, 2, replace=False))
        for k in range(intervals):
            t = lo + span * (k + rng.random())
            out.append(Query(s, d, float(min(t, math.nextafter(hi, lo)))))
    return out


def generate_grid_city(n: int, core: int = 6, c: int = 3, seed: int = 0,
                       loop_frac: float = 0.1, domain=DAY) -> TDGraph:
    """Synthetic road network: a ``core`` x ``core`` arterial grid with local
    streets branching off it as random trees, a fraction of which close small
    loops back to the street they branch from.  Every street is two-way.
    """
    if n < core * core:
        raise ValueError("n must cover the arterial grid")
    rng = np.random.default_rng(seed)
    pairs: set[tuple[int, int]] = set()
    parent = [0] * (n + 1)

    def vid(r, q):
        return r * core + q + 1

    for r in range(core):
        for q in range(core):
            if q + 1 < core:
                pairs.add((vid(r, q), vid(r, q + 1)))
            if r + 1 < core:
                pairs.add((vid(r, q), vid(r + 1, q)))
    for v in range(core * core + 1, n + 1):
        u = int(rng.integers(1, v))
        parent[v] = u
        pairs.add((u, v))
        gp = parent[u]
        if gp and rng.random() < loop_frac:
            pairs.add((gp, v))
    edges = []
    for a, b in sorted(pairs):
        # arterials are faster than local streets
        base_range = (20.0, 120.0) if b <= core * core else (30.0, 600.0)
        edges.append((a, b, diurnal_plf(rng, c, domain, base_range)))
        edges.append((b, a, diurnal_plf(rng, c, domain, base_range)))
    return TDGraph(n, edges, domain)


def _time_query(fn, repeat: int):
    times = []
    res = None
    for _ in range(repeat):
        start = time.perf_counter_ns()
        try:
            res = fn()
        except Unreachable:
            res = None
        times.append((time.perf_counter_ns() - start) / 1000.0)
    return res, times


def _cost(res, t: float) -> float:
    if res is None:
        return math.inf
    if getattr(res, "profile", None) is not None:
        return res.profile(t)
    return res.cost


def run_bench(tree: TreeDecomposition, queries: Sequence[Query],
              methods: dict[str, SelectionResult | None], mode: str = "scalar",
              oracle: bool = False, repeat: int = 10,
              threads: int | None = None) -> list[BenchRecord]:
    """Time every query under every method.

    ``methods`` maps a name to a selection (``None`` runs the basic query).
    With ``oracle`` on, each answer is checked against time-dependent
    Dijkstra and oracle timings are reported too.
    """
    if mode not in ("scalar", "profile"):
        raise ValueError(f"unknown mode {mode!r}")
    threads = threads or default_threads()
    truth: dict[int, float] = {}
    records: list[BenchRecord] = []
    g = tree.graph

    if oracle:
        def run_oracle(k):
            q = queries[k]
            res, times = _time_query(lambda: td_dijkstra(g, q.s, q.d, q.t), repeat)
            return k, (res.cost if res is not None else math.inf), times
        for k, cost, times in _map(run_oracle, range(len(queries)), threads):
            truth[k] = cost
            q = queries[k]
            records.append(BenchRecord("oracle", k, q.s, q.d, q.t, mode,
                                       statistics.median(times), statistics.fmean(times),
                                       cost, True))

    for name, sel in methods.items():
        def run_one(k, sel=sel):
            q = queries[k]
            t = q.t if mode == "scalar" else None
            if sel is None:
                fn = lambda: basic_query(tree, q.s, q.d, t, with_path=False)
            else:
                fn = lambda: query_with_shortcuts(tree, sel, q.s, q.d, t)
            res, times = _time_query(fn, repeat)
            return k, _cost(res, q.t), times
        for k, cost, times in _map(run_one, range(len(queries)), threads):
            q = queries[k]
            ok = None
            if oracle:
                ref = truth[k]
                ok = (cost == ref) or abs(cost - ref) <= CORRECT_TOL * max(1.0, abs(ref))
            records.append(BenchRecord(name, k, q.s, q.d, q.t, mode,
                                       statistics.median(times), statistics.fmean(times),
                                       cost, ok))
    return records


def _map(fn, items: Iterable[int], threads: int):
    if threads <= 1:
        return [fn(k) for k in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def write_csv(records: Iterable[BenchRecord], out: IO[str]) -> None:
    w = csv.DictWriter(out, fieldnames=CSV_COLUMNS, lineterminator="\n")
    w.writeheader()
    for r in records:
        row = asdict(r)
        row["correct"] = "" if r.correct is None else int(r.correct)
        w.writerow(row)


def summarize(records: Iterable[BenchRecord]) -> dict[str, dict[str, float]]:
    by: dict[str, list[BenchRecord]] = {}
    for r in records:
        by.setdefault(r.method, []).append(r)
    out = {}
    for name, rs in by.items():
        checked = [r.correct for r in rs if r.correct is not None]
        out[name] = {
            "queries": len(rs),
            "median_us": statistics.median(r.median_us for r in rs),
            "mean_us": statistics.fmean(r.mean_us for r in rs),
            "correct": (sum(checked) / len(checked)) if checked else float("nan"),
        }
    return out
