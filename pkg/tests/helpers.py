"""Small graph builders shared by several test modules."""
import numpy as np

from tdsp.graph import TDGraph, generate_graph
from tdsp.oracle import td_costs_from
from tdsp.plf import PLF


def const_graph(n, arcs, both=True):
    """Graph with constant weights; ``arcs`` is a list of (u, v, cost)."""
    edges = []
    for u, v, c in arcs:
        edges.append((u, v, PLF.constant(c)))
        if both:
            edges.append((v, u, PLF.constant(c)))
    return TDGraph(n, edges)


def path_graph(n, cost=5.0):
    return const_graph(n, [(k, k + 1, cost + k) for k in range(1, n)])


def complete_graph(n):
    return const_graph(n, [(i, j, i + j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def random_graph(seed, n=None, rng=None):
    rng = rng or np.random.default_rng(seed)
    n = n or int(rng.integers(10, 51))
    deg = float(rng.uniform(2, 4))
    c = int(rng.integers(2, 7))
    return generate_graph(n, deg, c, seed=seed)


def all_pairs(g, times):
    return {t: {s: td_costs_from(g, s, t) for s in g.vertices()} for t in times}


def rel_close(a, b, tol):
    return abs(a - b) <= tol * max(1.0, abs(a), abs(b))


# Worked example: 15-vertex tree.  Vertex names are the example's labels; the
# graph ids follow the intended elimination order, so that min-degree with
# smallest-id tie breaking reproduces it.
EXAMPLE_ORDER = [15, 11, 14, 13, 12, 10, 9, 8, 7, 6, 5, 4, 3, 2, 1]
EXAMPLE_ID = {name: k + 1 for k, name in enumerate(EXAMPLE_ORDER)}
EXAMPLE_EDGES = [(15, 8), (11, 8), (14, 9), (13, 9), (12, 10), (10, 4), (10, 5), (9, 5), (9, 4),
                 (8, 7), (8, 6), (7, 6), (6, 3), (5, 4), (5, 3), (4, 3), (4, 2), (4, 1), (3, 1),
                 (3, 2), (2, 1)]


def example_graph():
    return const_graph(15, [(EXAMPLE_ID[a], EXAMPLE_ID[b], 10 + a + b) for a, b in EXAMPLE_EDGES])


# Acceptance summary lines, printed at the end of the session by conftest.
ACCEPTANCE: list[str] = []


def report(number, title, ok, detail=""):
    line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}: {title}" + (f" ({detail})" if detail else "")
    ACCEPTANCE.append(line)
    print(line)
    return ok
