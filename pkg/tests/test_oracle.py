import itertools

import numpy as np
import pytest

from tdsp.errors import Unreachable
from tdsp.graph import TDGraph, generate_graph
from tdsp.oracle import path_cost, td_costs_from, td_dijkstra, validate_profile
from tdsp.plf import PLF, compound, min_plf

EX = PLF.from_points([(0, 10), (20, 10), (60, 15)])


def diamond():
    a = PLF.from_points([(0, 10), (30000, 40), (60000, 10)])
    b = PLF.from_points([(0, 15), (50000, 15)])
    c = PLF.from_points([(0, 30), (40000, 5)])
    d = PLF.from_points([(0, 12), (86400, 20)])
    return TDGraph(4, [(1, 2, a), (2, 4, b), (1, 3, c), (3, 4, d)]), (a, b, c, d)


def test_trivial_cases():
    g = TDGraph(2, [(1, 2, EX)])
    assert td_dijkstra(g, 1, 1, 50).vertices == [1]
    r = td_dijkstra(g, 1, 2, 0)
    assert r.cost == 10 and r.vertices == [1, 2]
    with pytest.raises(Unreachable):
        td_dijkstra(g, 2, 1, 0)


def test_diamond_matches_route_enumeration():
    g, (a, b, c, d) = diamond()
    for t in np.linspace(0, 86400, 37):
        ra = a(t) + b(t + a(t))
        rc = c(t) + d(t + c(t))
        r = td_dijkstra(g, 1, 4, t)
        assert r.cost == pytest.approx(min(ra, rc), abs=1e-9)
        assert r.vertices == ([1, 2, 4] if ra < rc else [1, 3, 4])


def test_validate_profile():
    g = TDGraph(2, [(1, 2, EX)])
    assert validate_profile(g, 1, 2, EX, samples=64).max_error == 0
    g, (a, b, c, d) = diamond()
    prof = min_plf(compound(a, b), compound(c, d))
    assert validate_profile(g, 1, 4, prof, samples=256).max_error <= 1e-6
    bad = PLF(prof.t, prof.c + 1)
    rep = validate_profile(g, 1, 4, bad, samples=256)
    assert rep.max_error == pytest.approx(1) and rep.first_failure == 0.0


def _simple_paths(g, s, d, limit):
    out, stack = [], [(s, [s])]
    while stack and len(out) < limit:
        v, p = stack.pop()
        for u in sorted(g.out[v]):
            if u == d:
                out.append(p + [u])
            elif u not in p:
                stack.append((u, p + [u]))
    return out


@pytest.mark.parametrize("seed", range(6))
def test_optimal_against_random_simple_paths(seed):
    g = generate_graph(12, 3, 4, seed=seed)
    rng = np.random.default_rng(seed)
    for _ in range(5):
        s, d = (int(x) for x in rng.choice(np.arange(1, 13), 2, replace=False))
        t = float(rng.uniform(0, 86400))
        r = td_dijkstra(g, s, d, t)
        assert abs(path_cost(g, r.vertices, t) - r.cost) <= 1e-9 * max(1, r.cost)
        for p in _simple_paths(g, s, d, 100):
            assert r.cost <= path_cost(g, p, t) + 1e-9


def test_costs_from_consistent():
    g = generate_graph(15, 3, 3, seed=2)
    costs = td_costs_from(g, 4, 1000)
    for v in range(1, 16):
        assert costs[v] == pytest.approx(td_dijkstra(g, 4, v, 1000).cost, abs=1e-9)
