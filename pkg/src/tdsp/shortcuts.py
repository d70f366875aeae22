"""Shortcut pairs between tree nodes and their ancestors, and their selection.

A pair ``(i, j)`` with ``X(j)`` an ancestor of ``X(i)`` stores the exact cost
functions ``i -> j`` and ``j -> i``.  Pairs are built top-down: the label of
``i`` is assembled from its bag weights and the already known labels of its
bag members.  A budget on total breakpoints decides which pairs to keep,
either optimally (0/1 knapsack) or with a two-pass greedy.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Iterable

import numpy as np

from .decomposition import TreeDecomposition, subtree_sizes
from .errors import InfeasibleParameters, NotAncestor
from .plf import PLF, compound, min_plf

DP_CELL_LIMIT = 400_000_000


@dataclass(eq=False)
class PairInstance:
    i: int
    j: int
    fwd: PLF | None
    bwd: PLF | None
    utility: float
    probability: float
    weight: int

    @property
    def key(self) -> tuple[int, int]:
        return (self.i, self.j)

    def __repr__(self) -> str:
        return (f"PairInstance({self.i}, {self.j}, weight={self.weight}, "
                f"utility={self.utility:.6g})")


def _weight(fwd: PLF | None, bwd: PLF | None) -> int:
    return (len(fwd) if fwd is not None else 0) + (len(bwd) if bwd is not None else 0)


@dataclass
class CandidateSet:
    """Every pair instance of a tree, in (elimination rank of i, height of j) order."""
    pairs: list[PairInstance]
    fingerprint: str
    index: dict[tuple[int, int], PairInstance] = field(default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index = {p.key: p for p in self.pairs}

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self):
        return iter(self.pairs)

    @property
    def total_weight(self) -> int:
        return sum(p.weight for p in self.pairs)

    def get(self, i: int, j: int) -> PairInstance | None:
        return self.index.get((i, j))


@dataclass
class SelectionResult:
    selected: list[PairInstance]
    budget: int
    fingerprint: str
    strategy: str = ""
    index: dict[tuple[int, int], PairInstance] = field(default_factory=dict)

    def __post_init__(self):
        self.index = {p.key: p for p in self.selected}

    def __len__(self) -> int:
        return len(self.selected)

    @property
    def total_utility(self) -> float:
        return math.fsum(p.utility for p in self.selected)

    @property
    def total_weight(self) -> int:
        return sum(p.weight for p in self.selected)

    @property
    def keys(self) -> set[tuple[int, int]]:
        return set(self.index)

    def get(self, i: int, j: int) -> PairInstance | None:
        return self.index.get((i, j))


# -- labels -----------------------------------------------------------------

Lookup = Callable[[int, int], tuple[PLF | None, PLF | None]]


def pair_label(tree: TreeDecomposition, i: int, j: int, lookup: Lookup) -> tuple[PLF | None, PLF | None]:
    """Cost functions ``i -> j`` and ``j -> i`` from ``X(i)`` and ancestor labels.

    ``lookup(v, j)`` must return the exact pair ``(v -> j, j -> v)`` for a bag
    member ``v != j``.
    """
    node = tree.nodes[i]
    fwd = bwd = None
    for v in node.others:
        out, inc = node.ws[v], node.wd[v]
        if v == j:
            a, b = out, inc
        else:
            to_j, from_j = lookup(v, j)
            a = compound(out, to_j) if out is not None and to_j is not None else None
            b = compound(from_j, inc) if inc is not None and from_j is not None else None
        if a is not None:
            fwd = a if fwd is None else min_plf(fwd, a)
        if b is not None:
            bwd = b if bwd is None else min_plf(bwd, b)
    return fwd, bwd


def oriented(tree: TreeDecomposition, get, v: int, j: int) -> tuple[PLF | None, PLF | None]:
    """``(v -> j, j -> v)`` from whichever of ``(v, j)`` / ``(j, v)`` is the pair."""
    if tree.rank[v] < tree.rank[j]:
        return get(v, j)
    b, f = get(j, v)
    return f, b


def compute_utility(tree: TreeDecomposition, i: int, j: int,
                    sizes: list[int] | None = None) -> tuple[float, float]:
    """Utility and probability of pair ``(i, j)``.

    The probability counts vertices ``k != j`` whose lowest common ancestor
    with ``i`` is ``X(j)``, over ``n``.
    """
    chain = tree.chain(i)
    hj = tree.node(j).height
    if hj >= len(chain) or chain[hj - 1] != j:
        raise NotAncestor(f"X({j}) is not a proper ancestor of X({i})")
    sizes = sizes if sizes is not None else subtree_sizes(tree)
    below = chain[hj]
    count = sizes[j] - sizes[below] - 1
    p = count / tree.n
    dh = tree.node(i).height - hj
    return dh * tree.treewidth * p, p


def build_all_candidates(tree: TreeDecomposition) -> CandidateSet:
    sizes = subtree_sizes(tree)
    index: dict[tuple[int, int], PairInstance] = {}

    def get(v, j):
        p = index[(v, j)]
        return p.fwd, p.bwd

    def lookup(v, j):
        return oriented(tree, get, v, j)

    for i in reversed(tree.sequence):
        for j in tree.anc(i):
            fwd, bwd = pair_label(tree, i, j, lookup)
            u, p = compute_utility(tree, i, j, sizes)
            index[(i, j)] = PairInstance(i, j, fwd, bwd, u, p, _weight(fwd, bwd))
    rank = tree.rank
    height = {v: tree.nodes[v].height for v in tree.sequence}
    pairs = sorted(index.values(), key=lambda q: (rank[q.i], height[q.j]))
    return CandidateSet(pairs, tree.fingerprint, index)


# -- selection --------------------------------------------------------------

def _items(candidates) -> list[PairInstance]:
    return list(candidates.pairs if isinstance(candidates, CandidateSet) else candidates)


def _fingerprint(candidates) -> str:
    return getattr(candidates, "fingerprint", "")


def select_dp(candidates, budget: int) -> SelectionResult:
    """Exact 0/1 knapsack over all pair instances.

    Ties keep the item out, so the smallest-index optimal set is preferred.
    """
    if budget < 0:
        raise InfeasibleParameters("budget must be non-negative")
    items = _items(candidates)
    fp = _fingerprint(candidates)
    total = sum(p.weight for p in items)
    if budget >= total:
        return SelectionResult(items, budget, fp, "dp")
    if len(items) * (budget + 1) > DP_CELL_LIMIT:
        raise InfeasibleParameters(
            f"exact selection needs {len(items)} x {budget + 1} cells; use the greedy strategy")
    best = np.zeros(budget + 1)
    take = np.zeros((len(items), budget + 1), dtype=bool)
    for k, p in enumerate(items):
        w = p.weight
        if w > budget:
            continue
        cand = best[:budget + 1 - w] + p.utility
        better = cand > best[w:]
        take[k, w:] = better
        best[w:] = np.where(better, cand, best[w:])
    chosen = []
    cap = budget
    for k in range(len(items) - 1, -1, -1):
        if take[k, cap]:
            chosen.append(items[k])
            cap -= items[k].weight
    chosen.reverse()
    return SelectionResult(chosen, budget, fp, "dp")


def _greedy_pass(items: list[PairInstance], order: Iterable[int], budget: int):
    chosen, weight = [], 0
    for k in order:
        if weight >= budget:
            break
        p = items[k]
        if weight + p.weight > budget:
            break
        chosen.append(k)
        weight += p.weight
    return chosen


def select_greedy(candidates, budget: int) -> SelectionResult:
    """Better of a utility-ordered and a density-ordered greedy pass.

    Each pass stops at the first item that does not fit.  Items heavier than
    the whole budget can never be selected and are left out beforehand; the
    half-optimum guarantee depends on it.
    """
    if budget < 0:
        raise InfeasibleParameters("budget must be non-negative")
    items = _items(candidates)
    fp = _fingerprint(candidates)
    usable = [k for k, p in enumerate(items) if p.weight <= budget]

    def density(k):
        w = items[k].weight
        return items[k].utility / w if w else math.inf

    by_utility = sorted(usable, key=lambda k: (-items[k].utility, k))
    by_density = sorted(usable, key=lambda k: (-density(k), k))
    s1 = _greedy_pass(items, by_utility, budget)
    s2 = _greedy_pass(items, by_density, budget)
    u1 = math.fsum(items[k].utility for k in s1)
    u2 = math.fsum(items[k].utility for k in s2)
    pick = s1 if u1 > u2 else s2
    return SelectionResult([items[k] for k in sorted(pick)], budget, fp, "greedy")


def budget_from_fraction(candidates: CandidateSet, frac: float) -> int:
    if not 0 <= frac <= 1:
        raise InfeasibleParameters("budget fraction must lie in [0, 1]")
    return int(math.floor(frac * candidates.total_weight + 1e-9))


# -- maintenance ------------------------------------------------------------

def update_edge(tree: TreeDecomposition, store, u: int, v: int, new: PLF) -> set[int]:
    """Re-weight edge ``u -> v`` in ``tree`` and repair ``store``.

    ``store`` is a CandidateSet or a SelectionResult built on ``tree``.  Pair
    labels of every node whose root chain meets a changed bag are rebuilt
    top-down.  A selection keeps its membership; labels of unselected
    intermediate pairs are recomputed on demand.  Returns the changed owners.
    """
    changed = tree.update_edge(u, v, new)
    dirty = {x for x in tree.sequence if any(c in changed for c in tree.chain(x))}
    fresh: dict[tuple[int, int], tuple[PLF | None, PLF | None]] = {}

    def get(i, j):
        key = (i, j)
        if key in fresh:
            return fresh[key]
        if i not in dirty:
            p = store.get(i, j)
            if p is not None:
                return p.fwd, p.bwd
        val = pair_label(tree, i, j, lambda a, b: oriented(tree, get, a, b))
        fresh[key] = val
        return val

    if isinstance(store, CandidateSet):
        targets = [p for p in store.pairs if p.i in dirty]
        targets.sort(key=lambda p: -tree.rank[p.i])
    else:
        targets = [p for p in store.selected if p.i in dirty]
    for p in targets:
        p.fwd, p.bwd = get(p.i, p.j)
        p.weight = _weight(p.fwd, p.bwd)
    store.fingerprint = tree.fingerprint
    return changed
