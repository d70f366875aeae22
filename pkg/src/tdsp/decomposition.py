"""Travel-function-preserving tree decomposition.

Vertices are eliminated in min-degree order.  Removing ``v`` connects every
pair of its neighbours ``i, j`` with ``min(w(i,j), w(i,v) ⊕ w(v,j))`` so that
all shortest cost functions among the survivors are unchanged.  Each
eliminated vertex owns a tree node whose bag is ``v`` plus its neighbours at
elimination time, together with snapshots of the weights to and from them.
"""
from __future__ import annotations

import hashlib
import heapq
from dataclasses import dataclass, field

from .errors import DisconnectedGraph, FIFOViolation, UnknownEdge, UnknownVertex
from .graph import TDGraph
from .plf import FIFO_TOL, PLF, compound, min_plf, simplify


def fold_step(cur: PLF | None, a: PLF | None, b: PLF | None, via: int) -> PLF | None:
    """One elimination contribution: ``min(cur, a ⊕ b)`` attributed to ``via``.

    Shared by construction and incremental update so both produce identical
    floating point results.
    """
    if a is None or b is None:
        return cur
    c = compound(a, b, via=via)
    return c if cur is None else min_plf(cur, c)


class WorkingGraph:
    """Mutable reduced graph used during elimination.

    ``adj`` is the undirected support; ``w`` maps directed pairs to weights.
    A pair may be adjacent without a directed weight in one or both
    directions (no path that way).
    """

    def __init__(self, g: TDGraph):
        self.n = g.n
        self.domain = g.domain
        self.adj: dict[int, set[int]] = {v: set() for v in range(1, g.n + 1)}
        self.w: dict[tuple[int, int], PLF] = {}
        for u, v, f in g.edges():
            self.adj[u].add(v)
            self.adj[v].add(u)
            self.w[(u, v)] = simplify(f)

    def __contains__(self, v: int) -> bool:
        return v in self.adj

    def neighbors(self, v: int) -> set[int]:
        try:
            return self.adj[v]
        except KeyError:
            raise UnknownVertex(f"vertex {v} not in the working graph") from None

    def weight(self, i: int, j: int) -> PLF | None:
        return self.w.get((i, j))

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def reduce_vertex(self, v: int) -> tuple[list[int], dict[int, PLF | None], dict[int, PLF | None]]:
        """Eliminate ``v``; return its neighbours and weight snapshots (out, in)."""
        nbrs = sorted(self.neighbors(v))
        ws = {u: self.w.pop((v, u), None) for u in nbrs}
        wd = {u: self.w.pop((u, v), None) for u in nbrs}
        for i in nbrs:
            self.adj[i].discard(v)
            for j in nbrs:
                if i == j:
                    continue
                self.adj[i].add(j)
                new = fold_step(self.w.get((i, j)), wd[i], ws[j], v)
                if new is not None:
                    self.w[(i, j)] = new
        del self.adj[v]
        return nbrs, ws, wd

    def to_graph(self) -> TDGraph:
        """Snapshot as a TDGraph on the original id range (removed ids isolated)."""
        return TDGraph(self.n, ((i, j, f) for (i, j), f in sorted(self.w.items())),
                       self.domain)


def reduce_vertex(working: WorkingGraph, v: int) -> None:
    working.reduce_vertex(v)


@dataclass(eq=False)
class TreeNode:
    owner: int
    bag: list[int]
    ws: dict[int, PLF | None]
    wd: dict[int, PLF | None]
    order: int
    parent: "TreeNode | None" = None
    children: list["TreeNode"] = field(default_factory=list)
    height: int = 0

    def __repr__(self) -> str:
        return f"TreeNode(owner={self.owner}, bag={self.bag}, height={self.height})"

    @property
    def others(self) -> list[int]:
        return self.bag[1:]


class TreeDecomposition:
    def __init__(self, graph: TDGraph, nodes: list[TreeNode | None], sequence: list[int]):
        self.graph = graph
        self.domain = graph.domain
        self.nodes = nodes
        self.sequence = sequence
        self.rank = [0] * (graph.n + 1)
        for k, v in enumerate(sequence):
            self.rank[v] = k
        self.root = nodes[sequence[-1]]
        self.treewidth = max(len(x.bag) for x in nodes[1:]) - 1
        self._chains: list[list[int]] = [[] for _ in nodes]
        for v in reversed(sequence):
            x = nodes[v]
            if x.parent is None:
                x.height = 1
                self._chains[v] = [v]
            else:
                x.height = x.parent.height + 1
                self._chains[v] = self._chains[x.parent.owner] + [v]
        self.treeheight = max(x.height for x in nodes[1:])
        self._contrib: dict[tuple[int, int], list[int]] | None = None
        self.fingerprint = self._fingerprint()

    @property
    def n(self) -> int:
        return self.graph.n

    def node(self, v: int) -> TreeNode:
        if not 1 <= v <= self.graph.n:
            raise UnknownVertex(f"vertex {v} outside 1..{self.graph.n}")
        return self.nodes[v]

    def chain(self, v: int) -> list[int]:
        """Root-first owners from the root down to ``v`` inclusive."""
        self.node(v)
        return self._chains[v]

    def anc(self, v: int) -> list[int]:
        """Owners of the proper ancestors of ``X(v)``, root first."""
        return self.chain(v)[:-1]

    def is_ancestor(self, a: int, v: int) -> bool:
        """True when ``X(a)`` is ``X(v)`` or one of its ancestors."""
        ca = self.chain(a)
        cv = self.chain(v)
        return len(ca) <= len(cv) and cv[len(ca) - 1] == a

    def lca(self, a: int, b: int) -> TreeNode:
        ca, cb = self.chain(a), self.chain(b)
        lo, hi = 1, min(len(ca), len(cb))
        # chains share a prefix; find its length
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if ca[mid - 1] == cb[mid - 1]:
                lo = mid
            else:
                hi = mid - 1
        return self.nodes[ca[lo - 1]]

    def _fingerprint(self) -> str:
        h = hashlib.sha256()
        h.update(",".join(map(str, self.sequence)).encode())
        for u, v, f in self.graph.edges():
            h.update(f"{u} {v}".encode())
            h.update(f.t.tobytes())
            h.update(f.c.tobytes())
        return h.hexdigest()[:32]

    # -- incremental update ------------------------------------------------

    def contributors(self) -> dict[tuple[int, int], list[int]]:
        """Unordered bag pairs -> owners whose elimination touched them, in order."""
        if self._contrib is None:
            out: dict[tuple[int, int], list[int]] = {}
            for z in self.sequence:
                others = self.nodes[z].others
                for k, i in enumerate(others):
                    for j in others[k + 1:]:
                        out.setdefault((min(i, j), max(i, j)), []).append(z)
            self._contrib = out
        return self._contrib

    def reduced_weight(self, x: int, y: int) -> PLF | None:
        """Recompute the reduced weight ``x -> y`` from the stored snapshots."""
        cur = self.graph.out[x].get(y)
        if cur is not None:
            cur = simplify(cur)
        for z in self.contributors().get((min(x, y), max(x, y)), ()):
            nz = self.nodes[z]
            cur = fold_step(cur, nz.wd[x], nz.ws[y], z)
        return cur

    def update_edge(self, u: int, v: int, new: PLF) -> set[int]:
        """Re-weight original edge ``u -> v`` and repair every affected snapshot.

        Returns the owners whose bag weights changed.  The elimination order
        does not depend on weights, so the repaired tree is identical to a
        rebuild on the updated graph.
        """
        if not self.graph.has_edge(u, v):
            raise UnknownEdge(f"no edge {u}->{v}")
        if not new.is_fifo(FIFO_TOL):
            raise FIFOViolation(f"edge {u}->{v} violates FIFO")
        self.graph = self.graph.with_weight(u, v, new)
        rank = self.rank
        changed: set[int] = set()
        heap = [(min(rank[u], rank[v]), u, v)]
        queued = {(u, v)}
        while heap:
            _, x, y = heapq.heappop(heap)
            queued.discard((x, y))
            w = self.reduced_weight(x, y)
            o = x if rank[x] < rank[y] else y
            node = self.nodes[o]
            old = node.ws[y] if o == x else node.wd[x]
            if w is old or (w is not None and w.same_as(old)):
                continue
            changed.add(o)
            if o == x:
                node.ws[y] = w
                affected = [(i, y) for i in node.others if i != y]
            else:
                node.wd[x] = w
                affected = [(x, j) for j in node.others if j != x]
            for p, q in affected:
                if (p, q) not in queued:
                    queued.add((p, q))
                    heapq.heappush(heap, (min(rank[p], rank[q]), p, q))
        self.fingerprint = self._fingerprint()
        return changed


def elimination_order(g: TDGraph) -> list[int]:
    """Min-degree order on the undirected support; ties to the smaller id."""
    adj = {v: set(g.neighbors(v)) for v in g.vertices()}
    heap = [(len(adj[v]), v) for v in adj]
    heapq.heapify(heap)
    order = []
    while heap:
        deg, v = heapq.heappop(heap)
        if v not in adj or deg != len(adj[v]):
            continue
        nbrs = adj.pop(v)
        for i in nbrs:
            adj[i].discard(v)
            adj[i] |= nbrs - {i}
        for i in nbrs:
            heapq.heappush(heap, (len(adj[i]), i))
        order.append(v)
    return order


def build_tfp_tree(g: TDGraph) -> TreeDecomposition:
    """Eliminate every vertex and assemble the decomposition tree."""
    g.require_connected()
    working = WorkingGraph(g)
    nodes: list[TreeNode | None] = [None] * (g.n + 1)
    rank: dict[int, int] = {}
    sequence: list[int] = []
    heap = [(working.degree(v), v) for v in range(1, g.n + 1)]
    heapq.heapify(heap)
    while heap:
        deg, v = heapq.heappop(heap)
        if v not in working or deg != working.degree(v):
            continue
        nbrs, ws, wd = working.reduce_vertex(v)
        rank[v] = len(sequence)
        sequence.append(v)
        nodes[v] = TreeNode(v, [v] + nbrs, ws, wd, rank[v])
        for i in nbrs:
            heapq.heappush(heap, (working.degree(i), i))
    # bag members are all eliminated later; order them by elimination rank
    for v in sequence:
        x = nodes[v]
        others = sorted(x.bag[1:], key=rank.__getitem__)
        x.bag = [v] + others
        if others:
            x.parent = nodes[others[0]]
            x.parent.children.append(x)
    roots = [v for v in sequence if nodes[v].parent is None]
    if len(roots) != 1:
        raise DisconnectedGraph("decomposition produced a forest")
    return TreeDecomposition(g, nodes, sequence)


def subtree_sizes(tree: TreeDecomposition) -> list[int]:
    sizes = [1] * (tree.n + 1)
    sizes[0] = 0
    for v in tree.sequence:
        p = tree.nodes[v].parent
        if p is not None:
            sizes[p.owner] += sizes[v]
    return sizes
