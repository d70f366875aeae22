"""Acceptance suite: one test per headline criterion, each printing a
PASS/FAIL line (collected again in the terminal summary)."""
import math
import time

import numpy as np
import pytest

from helpers import EXAMPLE_ID, all_pairs, example_graph, random_graph, report
from tdsp.bench import gen_queries, generate_grid_city, run_bench, summarize
from tdsp.decomposition import WorkingGraph, build_tfp_tree, elimination_order, reduce_vertex
from tdsp.errors import Unreachable
from tdsp.graph import diurnal_plf
from tdsp.index_io import dump_index, parse_index
from tdsp.oracle import td_costs_from, td_dijkstra
from tdsp.plf import PLF
from tdsp.query import basic_query
from tdsp.shortcut_query import query_with_shortcuts
from tdsp.shortcuts import (PairInstance, budget_from_fraction, build_all_candidates,
                            compute_utility, select_dp, select_greedy, update_edge)

DAY_SAMPLES_16 = np.linspace(0, 86400, 16, endpoint=False).tolist()
DAY_SAMPLES_256 = np.linspace(0, 86400, 256, endpoint=False)
BUDGETS = (0.0, 0.25, 0.5, 1.0)


def rel_err(a, b):
    if a == b:
        return 0.0
    return abs(a - b) / max(abs(a), abs(b))


def workload(g, seed, count=50):
    rng = np.random.default_rng(10_000 + seed)
    return [(int(rng.integers(1, g.n + 1)), int(rng.integers(1, g.n + 1)),
             float(rng.uniform(0, 86400))) for _ in range(count)]


# -- shared corpora -----------------------------------------------------------

@pytest.fixture(scope="module")
def oracle_corpus():
    """200 random graphs: n in [10, 50], average degree in [2, 4], c in [2, 6]."""
    return [random_graph(seed) for seed in range(200)]


@pytest.fixture(scope="module")
def small_corpus():
    """50 random graphs with n <= 40 and their all-pairs oracle tables."""
    out = []
    for k in range(50):
        g = random_graph(500 + k, n=10 + k % 31)
        out.append((g, all_pairs(g, DAY_SAMPLES_16)))
    return out


# -- 1 ---------------------------------------------------------------------------

def test_criterion_01_basic_query_matches_oracle(oracle_corpus):
    start = time.perf_counter()
    worst, bad, total = 0.0, 0, 0
    for seed, g in enumerate(oracle_corpus):
        tree = build_tfp_tree(g)
        for s, d, t in workload(g, seed):
            total += 1
            ref = td_dijkstra(g, s, d, t).cost
            got = basic_query(tree, s, d, t, with_path=False).cost
            e = rel_err(got, ref)
            worst = max(worst, e)
            bad += e > 1e-6
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 120
    report(1, "basic query equals time-dependent Dijkstra", ok,
           f"{total} queries, max rel err {worst:.2e}, {elapsed:.1f}s")
    assert bad == 0
    assert elapsed < 120


# -- 2 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_02_shortcut_query_matches_basic(oracle_corpus):
    start = time.perf_counter()
    worst_s = worst_p = 0.0
    bad = scalar = profile = 0
    for seed, g in enumerate(oracle_corpus):
        tree = build_tfp_tree(g)
        cands = build_all_candidates(tree)
        queries = workload(g, seed)
        base = [basic_query(tree, s, d, t, with_path=False).cost for s, d, t in queries]
        # profile comparisons on the first few pairs of each workload
        prof_pairs = [(s, d) for s, d, _ in queries[:16]]
        base_prof = [basic_query(tree, s, d).profile.evaluate(DAY_SAMPLES_256)
                     for s, d in prof_pairs]
        for frac in BUDGETS:
            n_budget = budget_from_fraction(cands, frac)
            for select in (select_dp, select_greedy):
                sel = select(cands, n_budget)
                for (s, d, t), ref in zip(queries, base):
                    e = rel_err(query_with_shortcuts(tree, sel, s, d, t).cost, ref)
                    worst_s = max(worst_s, e)
                    bad += e > 1e-9
                    scalar += 1
                for (s, d), ref in zip(prof_pairs, base_prof):
                    got = query_with_shortcuts(tree, sel, s, d).profile.evaluate(DAY_SAMPLES_256)
                    e = float(np.max(np.abs(got - ref) / np.maximum(np.abs(ref), 1e-300)))
                    worst_p = max(worst_p, e)
                    bad += e > 1e-6
                    profile += 1
    elapsed = time.perf_counter() - start
    ok = bad == 0 and elapsed < 600
    report(2, "shortcut query equals basic query", ok,
           f"{scalar} scalar (max {worst_s:.1e}), {profile} profile x256 (max {worst_p:.1e}), "
           f"{elapsed:.0f}s")
    assert bad == 0
    assert elapsed < 600


# -- 3 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_03_every_elimination_step_preserves_costs(small_corpus):
    worst, bad, steps = 0.0, 0, 0
    for g, truth in small_corpus:
        working = WorkingGraph(g)
        alive = set(g.vertices())
        for v in elimination_order(g)[:-1]:
            reduce_vertex(working, v)
            alive.discard(v)
            h = working.to_graph()
            steps += 1
            for t in DAY_SAMPLES_16:
                for s in alive:
                    got = td_costs_from(h, s, t)
                    ref = truth[t][s]
                    for d in alive:
                        if (d in got) != (d in ref):
                            bad += 1
                            continue
                        if d in got:
                            e = rel_err(got[d], ref[d])
                            worst = max(worst, e)
                            bad += e > 1e-6
    report(3, "vertex elimination preserves all survivor costs", bad == 0,
           f"{len(small_corpus)} graphs, {steps} steps, max rel err {worst:.2e}")
    assert bad == 0


# -- 4 ---------------------------------------------------------------------------

def exhaustive_best(pairs, budget):
    """Largest utility over all 2^k subsets within the budget.

    Subset sums are built item by item in float64; near-maximal subsets are
    then re-summed with fsum, the same summation the selection reports use.
    """
    w = np.zeros(1, dtype=np.int64)
    u = np.zeros(1)
    for p in pairs:
        w = np.concatenate([w, w + p.weight])
        u = np.concatenate([u, u + p.utility])
    feasible = np.flatnonzero(w <= budget)
    top = u[feasible].max()
    best = 0.0
    for mask in feasible[u[feasible] >= top - 1e-6]:
        chosen = [p.utility for k, p in enumerate(pairs) if mask >> k & 1]
        best = max(best, math.fsum(chosen))
    return best


def random_items(rng, k, max_weight):
    return [PairInstance(x, 0, None, None, float(rng.uniform(0, 10)), 0.0,
                         int(rng.integers(1, max_weight + 1))) for x in range(k)]


def test_criterion_04_dp_is_optimal():
    rng = np.random.default_rng(4)
    bad = 0
    for _ in range(100):
        pairs = random_items(rng, int(rng.integers(1, 21)), 30)
        budget = int(rng.integers(0, 101))
        got = select_dp(pairs, budget)
        bad += got.total_utility != exhaustive_best(pairs, budget) or got.total_weight > budget
    report(4, "DP selection equals exhaustive optimum", bad == 0, f"100 instances, {bad} mismatches")
    assert bad == 0


# -- 5 ---------------------------------------------------------------------------

def test_criterion_05_greedy_half_ratio():
    rng = np.random.default_rng(5)
    worst = 1.0
    for _ in range(500):
        pairs = random_items(rng, int(rng.integers(1, 31)), 60)
        budget = int(rng.integers(0, 201))
        opt = select_dp(pairs, budget).total_utility
        got = select_greedy(pairs, budget).total_utility
        if opt > 0:
            worst = min(worst, got / opt)
    adversary = [PairInstance(0, 0, None, None, 6.5, 0.0, 6),
                 PairInstance(1, 0, None, None, 5.0, 0.0, 5),
                 PairInstance(2, 0, None, None, 5.0, 0.0, 5)]
    adv = select_greedy(adversary, 10).total_utility / select_dp(adversary, 10).total_utility
    ok = worst >= 0.5 and 0.5 <= adv < 0.75
    report(5, "greedy keeps half the optimum", ok,
           f"500 random instances, worst ratio {worst:.3f}; adversarial ratio {adv:.3f}")
    assert worst >= 0.5
    assert 0.5 <= adv < 0.75


# -- 6 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_06_candidates_match_oracle(small_corpus):
    worst, bad, checked = 0.0, 0, 0
    for g, truth in small_corpus:
        for p in build_all_candidates(build_tfp_tree(g)).pairs:
            for f, a, b in ((p.fwd, p.i, p.j), (p.bwd, p.j, p.i)):
                for t in DAY_SAMPLES_16:
                    ref = truth[t][a].get(b)
                    checked += 1
                    if f is None or ref is None:
                        bad += (f is None) != (ref is None)
                        continue
                    e = rel_err(f(t), ref)
                    worst = max(worst, e)
                    bad += e > 1e-6
    report(6, "every shortcut candidate equals the oracle", bad == 0,
           f"{checked} samples, max rel err {worst:.2e}")
    assert bad == 0


# -- 7 ---------------------------------------------------------------------------

def test_criterion_07_worked_examples():
    f = PLF.from_points([(0, 10), (20, 10), (60, 15)])
    evals = [f(0), f(20), f(60)]
    tree = build_tfp_tree(example_graph())
    u, p = compute_utility(tree, EXAMPLE_ID[12], EXAMPLE_ID[3])
    ok = evals == [10, 10, 15] and abs(p - 5 / 15) < 1e-12 and abs(u - 4) < 1e-12
    report(7, "worked-example values", ok, f"f(0,20,60)={evals}, p={p:.6f}, u={u:.6f}")
    assert evals == [10, 10, 15]
    assert p == pytest.approx(5 / 15, abs=1e-12)
    assert u == pytest.approx(4.0, abs=1e-12)


# -- 8 ---------------------------------------------------------------------------

def _pointwise(f, g):
    if f is None or g is None:
        return 0.0 if f is None and g is None else math.inf
    a, b = f.evaluate(DAY_SAMPLES_256), g.evaluate(DAY_SAMPLES_256)
    return float(np.max(np.abs(a - b) / np.maximum(1.0, np.abs(b))))


def test_criterion_08_incremental_update_equals_rebuild():
    g = random_graph(8, n=30)
    tree = build_tfp_tree(g)
    cands = build_all_candidates(tree)
    tree_sel = parse_index(dump_index(tree))
    sel = select_greedy(build_all_candidates(tree_sel), budget_from_fraction(cands, 0.5))
    rng = np.random.default_rng(8)
    edges = list(g.edges())
    for k in rng.choice(len(edges), 10, replace=False):
        u, v, _ = edges[k]
        w = diurnal_plf(rng, 4)
        g = g.with_weight(u, v, w)
        update_edge(tree, cands, u, v, w)
        update_edge(tree_sel, sel, u, v, w)
    fresh = build_tfp_tree(g)
    fresh_cands = build_all_candidates(fresh)
    worst = 0.0
    for v in fresh.sequence:
        a, b = tree.nodes[v], fresh.nodes[v]
        assert a.bag == b.bag
        for x in b.others:
            worst = max(worst, _pointwise(a.ws[x], b.ws[x]), _pointwise(a.wd[x], b.wd[x]))
    for p in fresh_cands.pairs:
        q = cands.get(p.i, p.j)
        worst = max(worst, _pointwise(q.fwd, p.fwd), _pointwise(q.bwd, p.bwd),
                    abs(q.utility - p.utility))
    for s, d, t in workload(g, 8):
        ref = basic_query(fresh, s, d, t, with_path=False).cost
        worst = max(worst, rel_err(basic_query(tree, s, d, t, with_path=False).cost, ref),
                    rel_err(query_with_shortcuts(tree_sel, sel, s, d, t).cost, ref))
    ok = worst <= 1e-9
    report(8, "ten incremental updates equal a rebuild", ok, f"max deviation {worst:.1e}")
    assert worst <= 1e-9


# -- 9 ---------------------------------------------------------------------------

@pytest.mark.slow
def test_criterion_09_latency_falls_with_budget():
    start = time.perf_counter()
    g = generate_grid_city(5000, core=6, c=3, seed=0, loop_frac=0.1)
    tree = build_tfp_tree(g)
    cands = build_all_candidates(tree)
    methods = {f"{frac:.0%}": select_greedy(cands, budget_from_fraction(cands, frac))
               for frac in BUDGETS}
    queries = gen_queries(g.n, 100, 10, seed=9, domain=g.domain)
    records = run_bench(tree, queries, methods, repeat=10, threads=1)
    medians = [summarize(records)[name]["median_us"] for name in methods]
    # answers must stay exact on a sample of the workload
    wrong = 0
    for r in records[::40]:
        try:
            ref = td_dijkstra(g, r.s, r.d, r.t).cost
        except Unreachable:
            ref = math.inf
        wrong += rel_err(r.cost, ref) > 1e-6
    elapsed = time.perf_counter() - start
    falling = all(a >= b for a, b in zip(medians, medians[1:]))
    speedup = medians[0] / medians[-1]
    ok = falling and speedup >= 2 and elapsed < 900 and wrong == 0
    report(9, "median latency falls as the budget grows", ok,
           "medians " + " / ".join(f"{m:.1f}us" for m in medians)
           + f", speedup {speedup:.1f}x, {elapsed:.0f}s")
    assert wrong == 0
    assert falling
    assert speedup >= 2
    assert elapsed < 900


# -- 10 --------------------------------------------------------------------------

def test_criterion_10_full_budget_operation_bound(oracle_corpus):
    worst, bad, total = 0.0, 0, 0
    for seed, g in enumerate(oracle_corpus[:50]):
        tree = build_tfp_tree(g)
        cands = build_all_candidates(tree)
        sel = select_greedy(cands, cands.total_weight)
        for s, d, t in workload(g, seed, 20):
            if s == d:
                continue
            bag = len(tree.lca(s, d).bag)
            for res in (query_with_shortcuts(tree, sel, s, d, t),
                        query_with_shortcuts(tree, sel, s, d)):
                total += 1
                worst = max(worst, res.ops / bag)
                bad += res.case != 1 or res.ops > 3 * bag
    report(10, "full-budget queries touch at most 3 functions per cut vertex", bad == 0,
           f"{total} queries, max ops/bag {worst:.2f}")
    assert bad == 0
