"""Queries that reuse selected shortcut pairs.

Let ``C`` be the bag of the lowest common ancestor of ``X(s)`` and ``X(d)``.

* case 1: shortcuts (or a trivial identity) link ``s`` and ``d`` with every
  vertex of ``C``; the answer is a direct join over ``C``.
* case 2: some links exist.  Known links seed the cost tables and give an
  upper bound on the answer; the climbs skip any vertex whose cost already
  exceeds that bound (it is marked ``NIL`` and never relaxed from).
* case 3: no links at all; fall back to :func:`basic_query`.

Acceleration never changes an answer.
"""
from __future__ import annotations

import math

from .decomposition import TreeDecomposition
from .errors import StaleSelection, Unreachable
from .plf import PLF, ZERO, compound, min_plf
from .query import Counter, QueryResult, basic_query, join_profiles
from .shortcuts import SelectionResult

INF = math.inf
# pruning only fires when a cost exceeds the bound by more than rounding noise
PRUNE_SLACK = 1e-6


def links(tree: TreeDecomposition, sel: SelectionResult, x: int, cut: list[int]):
    """Known exact cost pairs between ``x`` and each cut vertex.

    Returns ``{w: (x -> w, w -> x)}`` for every ``w`` that is ``x`` itself or
    joined to ``x`` by a selected pair.
    """
    out = {}
    rank = tree.rank
    for w in cut:
        if w == x:
            out[w] = (ZERO, ZERO)
            continue
        if rank[x] < rank[w]:
            p = sel.index.get((x, w))
            if p is not None:
                out[w] = (p.fwd, p.bwd)
        else:
            p = sel.index.get((w, x))
            if p is not None:
                out[w] = (p.bwd, p.fwd)
    return out


def _check(tree: TreeDecomposition, sel: SelectionResult) -> None:
    if sel.fingerprint != tree.fingerprint:
        raise StaleSelection("selection was built for a different index")


def compute_upper_bound(tree: TreeDecomposition, sel: SelectionResult, s: int, d: int,
                        t: float | None = None):
    """Cheapest cost over cut vertices linked to both endpoints (``inf`` if none)."""
    _check(tree, sel)
    cut = list(tree.lca(s, d).bag)
    ls, ld = links(tree, sel, s, cut), links(tree, sel, d, cut)
    return _bound(ls, ld, t, Counter())


def _bound(ls, ld, t, ops: Counter):
    both = [w for w in ls if w in ld]
    if t is None:
        best = None
        for w in both:
            f, g = ls[w][0], ld[w][1]
            if f is None or g is None:
                continue
            c = compound(f, g)
            best = c if best is None else min_plf(best, c)
            ops.n += 2
        return best if best is not None else INF
    best = INF
    for w in both:
        f, g = ls[w][0], ld[w][1]
        if f is None or g is None:
            continue
        a = t + f(t)
        best = min(best, a + g(a) - t)
        ops.n += 2
    return best


def query_with_shortcuts(tree: TreeDecomposition, sel: SelectionResult, s: int, d: int,
                         t: float | None = None, with_path: bool = False) -> QueryResult:
    """Scalar query when ``t`` is given, profile query otherwise.

    Paths are not stored with shortcuts; ``with_path`` answers through the
    basic query, which returns the same cost.
    """
    _check(tree, sel)
    tree.node(s)
    tree.node(d)
    if s == d or with_path:
        return basic_query(tree, s, d, t, with_path=with_path)
    cut = list(tree.lca(s, d).bag)
    ls, ld = links(tree, sel, s, cut), links(tree, sel, d, cut)
    trivial = len(ls) + len(ld) - (s in cut) - (d in cut)
    if trivial == 0:
        res = basic_query(tree, s, d, t, with_path=False)
        res.case = 3
        return res
    if t is None:
        return _profile(tree, s, d, cut, ls, ld)
    return _scalar(tree, s, d, float(t), cut, ls, ld)


# -- scalar -----------------------------------------------------------------

def _pruned_sweep(tree, chain, arr, fixed, bound, ops: Counter) -> set[int]:
    """Arrival sweep over ``chain`` that never relaxes from a vertex past ``bound``.

    ``fixed`` vertices hold exact values and are not updated.  Returns the
    vertices marked NIL.
    """
    nodes = tree.nodes
    nil = set()
    n = 0
    bound += PRUNE_SLACK
    for v in reversed(chain):
        a = arr.get(v, INF)
        if a == INF:
            continue
        if a > bound:
            nil.add(v)
            continue
        for u, f in nodes[v].ws.items():
            if f is None or u in fixed or u in nil:
                continue
            b = a + f(a)
            n += 1
            if b < arr.get(u, INF):
                arr[u] = b
    for x in chain:
        # x is final here; its NIL state from the upward sweep may no longer hold
        best = arr.get(x, INF)
        if x not in fixed:
            for u, f in nodes[x].wd.items():
                if f is None or u in nil:
                    continue
                a = arr.get(u, INF)
                if a == INF:
                    continue
                b = a + f(a)
                n += 1
                if b < best:
                    best = b
        if best < INF:
            arr[x] = best
        if best > bound:
            nil.add(x)
        else:
            nil.discard(x)
    ops.n += n
    return {v for v in nil if v in arr}


def _scalar(tree, s, d, t, cut, ls, ld) -> QueryResult:
    ops = Counter()
    res = QueryResult(s, d, t)
    if len(ls) == len(cut) and len(ld) == len(cut):
        res.case = 1
        best, via = INF, None
        for w in cut:
            f, g = ls[w][0], ld[w][1]
            if f is None or g is None:
                continue
            a = t + f(t) if w != s else t
            c = a + g(a) if w != d else a
            ops.n += (w != s) + (w != d)
            if c < best:
                best, via = c, w
        if best == INF:
            raise Unreachable(f"{d} is not reachable from {s}")
        res.cost, res.via, res.ops = best - t, via, ops.n
        return res
    res.case = 2
    # the bound is an absolute arrival time
    bound = t + _bound(ls, ld, t, ops)
    arr_s = {s: t}
    for w, (f, _) in ls.items():
        if f is not None:
            arr_s[w] = t + f(t) if w != s else t
            ops.n += w != s
    if len(ls) < len(cut):
        res.pruned |= _pruned_sweep(tree, tree.chain(s), arr_s, set(ls) - {s}, bound, ops)
    best, via = INF, None
    for w, (_, g) in ld.items():
        a = arr_s.get(w, INF)
        if g is None or a == INF:
            continue
        c = a + g(a) if w != d else a
        ops.n += w != d
        if c < best:
            best, via = c, w
    if len(ld) < len(cut):
        arr_d = {w: arr_s[w] for w in cut if w in arr_s}
        res.pruned_d = _pruned_sweep(tree, tree.chain(d), arr_d, set(arr_d),
                                     min(bound, best), ops)
        if arr_d.get(d, INF) < best:
            best, via = arr_d[d], None
    if best == INF:
        raise Unreachable(f"{d} is not reachable from {s}")
    res.cost, res.via, res.ops = best - t, via, ops.n
    return res


# -- profile ----------------------------------------------------------------

def _dominated(f: PLF, bound) -> bool:
    """Safe dominance: ``f`` exceeds ``bound`` at every time."""
    if bound is INF:
        return False
    return f.min_value() > bound.max_value() + PRUNE_SLACK


def _pruned_from(tree, chain, cost, fixed, bound, ops, to_dest: bool) -> set[int]:
    nodes = tree.nodes
    nil = set()
    for v in reversed(chain):
        f = cost.get(v)
        if f is None:
            continue
        if _dominated(f, bound):
            nil.add(v)
            continue
        node = nodes[v]
        for u, w in (node.wd if to_dest else node.ws).items():
            if w is None or u in fixed or u in nil:
                continue
            c = compound(w, f) if to_dest else compound(f, w)
            cost[u] = min_plf(cost.get(u), c)
            ops.n += 2
    for x in chain:
        best = cost.get(x)
        if x not in fixed:
            node = nodes[x]
            for u, w in (node.ws if to_dest else node.wd).items():
                f = cost.get(u)
                if w is None or f is None or u in nil:
                    continue
                c = compound(w, f) if to_dest else compound(f, w)
                best = min_plf(best, c)
                ops.n += 2
        if best is None:
            continue
        cost[x] = best
        if _dominated(best, bound):
            nil.add(x)
        else:
            nil.discard(x)
    return nil


def _profile(tree, s, d, cut, ls, ld) -> QueryResult:
    ops = Counter()
    res = QueryResult(s, d, None)
    fs = {s: ZERO, **{w: pair[0] for w, pair in ls.items() if pair[0] is not None}}
    gd = {d: ZERO, **{w: pair[1] for w, pair in ld.items() if pair[1] is not None}}
    if len(ls) == len(cut) and len(ld) == len(cut):
        res.case = 1
    else:
        res.case = 2
        bound = _bound(ls, ld, None, ops)
        if len(ls) < len(cut):
            res.pruned = _pruned_from(tree, tree.chain(s), fs, set(ls) - {s}, bound, ops, False)
        if len(ld) < len(cut):
            res.pruned_d = _pruned_from(tree, tree.chain(d), gd, set(ld) - {d}, bound, ops, True)
    res.profile, res.via = join_profiles(cut, fs, gd, ops)
    res.ops = ops.n
    if res.profile is None or res.profile.is_infinite:
        raise Unreachable(f"{d} is not reachable from {s}")
    return res
