"""Tree-climbing queries over a decomposition.

Every shortest path in the reduced graph can be taken "up then down" in
elimination order, so the exact costs from ``v`` to everything on its root
chain come from two sweeps: an upward sweep along the chain relaxing each
node's outgoing bag weights, then a downward sweep (root first) relaxing the
incoming ones.  A query joins the two endpoint tables over the bag of their
lowest common ancestor, which separates them.

Scalar queries propagate arrival times; profile queries propagate whole cost
functions.  ``ops`` counts PLF operations (an evaluation, a compound or a
minimum each count one).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .decomposition import TreeDecomposition
from .errors import CorruptProvenance, Unreachable
from .plf import DIRECT, PLF, ZERO, compound, min_plf

INF = math.inf

FROM_SOURCE = "from-source"
TO_DESTINATION = "to-destination"


@dataclass
class Hop:
    """One reduced-graph edge used by a scalar query."""
    a: int
    b: int
    depart: float
    weight: PLF


@dataclass
class QueryResult:
    s: int
    d: int
    t: float | None
    cost: float | None = None
    profile: PLF | None = None
    via: int | None = None
    hops: list[Hop] = field(default_factory=list)
    path: list[int] | None = None
    ops: int = 0
    case: int = 0
    # vertices proven useless by a shortcut bound (source side, destination side)
    pruned: set[int] = field(default_factory=set)
    pruned_d: set[int] = field(default_factory=set)

    @property
    def is_profile(self) -> bool:
        return self.t is None


class Counter:
    __slots__ = ("n",)

    def __init__(self):
        self.n = 0


# -- scalar sweeps ----------------------------------------------------------

def sweep_scalar(tree: TreeDecomposition, chain: list[int], arr: dict[int, float],
                 pred: dict[int, tuple[int, float, PLF]], ops: Counter) -> None:
    """Exact earliest arrivals on ``chain`` given exact seed arrivals in ``arr``.

    ``chain`` is root first; ``arr`` and ``pred`` are updated in place.
    """
    nodes = tree.nodes
    n = 0
    for v in reversed(chain):
        a = arr.get(v, INF)
        if a == INF:
            continue
        for u, f in nodes[v].ws.items():
            if f is None:
                continue
            b = a + f(a)
            n += 1
            if b < arr.get(u, INF):
                arr[u] = b
                pred[u] = (v, a, f)
    for x in chain:
        best = arr.get(x, INF)
        for u, f in nodes[x].wd.items():
            a = arr.get(u, INF)
            if f is None or a == INF:
                continue
            b = a + f(a)
            n += 1
            if b < best:
                best = b
                pred[x] = (u, a, f)
        if best < INF:
            arr[x] = best
    ops.n += n


# -- profile sweeps ---------------------------------------------------------

def sweep_from(tree: TreeDecomposition, chain: list[int], cost: dict[int, PLF],
               ops: Counter) -> None:
    """Cost functions from a source to every vertex of ``chain``."""
    nodes = tree.nodes
    for v in reversed(chain):
        f = cost.get(v)
        if f is None:
            continue
        for u, w in nodes[v].ws.items():
            if w is None:
                continue
            cost[u] = min_plf(cost.get(u), compound(f, w))
            ops.n += 2
    for x in chain:
        best = cost.get(x)
        for u, w in nodes[x].wd.items():
            f = cost.get(u)
            if w is None or f is None:
                continue
            best = min_plf(best, compound(f, w))
            ops.n += 2
        if best is not None:
            cost[x] = best


def sweep_to(tree: TreeDecomposition, chain: list[int], cost: dict[int, PLF],
             ops: Counter) -> None:
    """Cost functions from every vertex of ``chain`` to a destination."""
    nodes = tree.nodes
    for v in reversed(chain):
        g = cost.get(v)
        if g is None:
            continue
        for u, w in nodes[v].wd.items():
            if w is None:
                continue
            cost[u] = min_plf(cost.get(u), compound(w, g))
            ops.n += 2
    for x in chain:
        best = cost.get(x)
        for u, w in nodes[x].ws.items():
            g = cost.get(u)
            if w is None or g is None:
                continue
            best = min_plf(best, compound(w, g))
            ops.n += 2
        if best is not None:
            cost[x] = best


def ascend(tree: TreeDecomposition, v: int, direction: str = FROM_SOURCE,
           t: float | None = None) -> dict[int, float | PLF]:
    """Exact costs between ``v`` and every proper ancestor of ``X(v)``.

    With ``t`` given the table holds scalar costs departing ``v`` at ``t``
    (from-source only); otherwise cost functions.
    """
    chain = tree.chain(v)
    ops = Counter()
    if t is not None:
        if direction != FROM_SOURCE:
            raise ValueError("scalar tables are only defined from the source")
        arr = {v: float(t)}
        sweep_scalar(tree, chain, arr, {}, ops)
        return {u: a - t for u, a in arr.items() if u != v}
    table = {v: ZERO}
    if direction == FROM_SOURCE:
        sweep_from(tree, chain, table, ops)
    elif direction == TO_DESTINATION:
        sweep_to(tree, chain, table, ops)
    else:
        raise ValueError(f"unknown direction {direction!r}")
    del table[v]
    return table


# -- queries ----------------------------------------------------------------

def cut_set(tree: TreeDecomposition, s: int, d: int) -> list[int]:
    return list(tree.lca(s, d).bag)


def _trace(pred, v, stop) -> list[Hop]:
    hops = []
    while v in pred and v not in stop:
        a, dep, f = pred[v]
        hops.append(Hop(a, v, dep, f))
        v = a
    hops.reverse()
    return hops


def basic_query(tree: TreeDecomposition, s: int, d: int, t: float | None = None,
                with_path: bool = True) -> QueryResult:
    """Scalar query when ``t`` is given, profile query otherwise."""
    tree.node(s)
    tree.node(d)
    if t is None:
        return _profile_query(tree, s, d)
    res = QueryResult(s, d, float(t))
    if s == d:
        res.cost, res.via, res.path = 0.0, s, [s]
        return res
    ops = Counter()
    arr_s: dict[int, float] = {s: float(t)}
    pred_s: dict = {}
    sweep_scalar(tree, tree.chain(s), arr_s, pred_s, ops)
    cut = cut_set(tree, s, d)
    arr_d = {w: arr_s[w] for w in cut if w in arr_s}
    pred_d: dict = {}
    sweep_scalar(tree, tree.chain(d), arr_d, pred_d, ops)
    res.ops = ops.n
    finish_scalar(tree, res, arr_s, pred_s, arr_d, pred_d, with_path)
    return res


def finish_scalar(tree, res: QueryResult, arr_s, pred_s, arr_d, pred_d, with_path) -> None:
    end = arr_d.get(res.d, INF)
    if end == INF:
        raise Unreachable(f"{res.d} is not reachable from {res.s}")
    res.cost = end - res.t
    hops_d = _trace(pred_d, res.d, ())
    res.via = hops_d[0].a if hops_d else res.d
    res.hops = _trace(pred_s, res.via, ()) + hops_d
    if with_path:
        res.path = reconstruct_path(tree, res)


def _profile_query(tree: TreeDecomposition, s: int, d: int) -> QueryResult:
    res = QueryResult(s, d, None)
    if s == d:
        res.profile, res.via = ZERO, s
        return res
    ops = Counter()
    fs = {s: ZERO}
    sweep_from(tree, tree.chain(s), fs, ops)
    gd = {d: ZERO}
    sweep_to(tree, tree.chain(d), gd, ops)
    res.profile, res.via = join_profiles(tree.lca(s, d).bag, fs, gd, ops)
    res.ops = ops.n
    if res.profile is None or res.profile.is_infinite:
        raise Unreachable(f"{d} is not reachable from {s}")
    return res


def join_profiles(cut, fs, gd, ops: Counter):
    """``min over w in cut of fs[w] ⊕ gd[w]``; ``via`` is the cut vertex with the
    lowest single-route minimum (profiles may switch routes during the day)."""
    best, via, low = None, None, INF
    for w in cut:
        f, g = fs.get(w), gd.get(w)
        if f is None or g is None:
            continue
        c = compound(f, g)
        ops.n += 1
        if c.min_value() < low:
            low, via = c.min_value(), w
        if best is None:
            best = c
        else:
            best = min_plf(best, c)
            ops.n += 1
    return best, via


# -- paths ------------------------------------------------------------------

def expand_hop(tree: TreeDecomposition, a: int, b: int, t: float, f: PLF,
               out: list[int]) -> float:
    """Append the original-graph vertices after ``a`` on hop ``a -> b``.

    Returns the arrival time at ``b``.
    """
    stack = [(a, b, t, f)]
    now = t
    while stack:
        a, b, dep, f = stack.pop()
        z = f.via_at(dep)
        if z == DIRECT:
            if not tree.graph.has_edge(a, b):
                raise CorruptProvenance(f"hop {a}->{b} claims an original edge that does not exist")
            out.append(b)
            now = dep + f(dep)
            continue
        node = tree.nodes[z] if 1 <= z <= tree.n else None
        if node is None or a not in node.wd or b not in node.ws:
            raise CorruptProvenance(f"hop {a}->{b} names {z}, which does not separate them")
        first, second = node.wd[a], node.ws[b]
        if first is None or second is None:
            raise CorruptProvenance(f"hop {a}->{b} via {z} has no realising weights")
        mid = dep + first(dep)
        # expand the first half before the second: push second, then first
        stack.append((z, b, mid, second))
        stack.append((a, z, dep, first))
    return now


def reconstruct_path(tree: TreeDecomposition, res: QueryResult) -> list[int]:
    """Original-graph vertex sequence for a scalar result."""
    if res.t is None:
        raise ValueError("paths are only reconstructed for scalar queries")
    path = [res.s]
    for h in res.hops:
        if path[-1] != h.a:
            raise CorruptProvenance("hop chain is not contiguous")
        expand_hop(tree, h.a, h.b, h.depart, h.weight, path)
    if path[-1] != res.d:
        raise CorruptProvenance("hop chain does not end at the destination")
    return path
