"""Text serialisation of decompositions and shortcut selections.

Index files::

    tdsp-index 1
    fingerprint <hex>
    p td <n> <m> <t_begin> <t_end>
    a <u> <v> <k> <t1> <c1> ...          original edges
    order <v1> <v2> ...                  elimination sequence
    x <owner> <member> ...               bag, owner first
    s <owner> <u> <plf>                  owner -> u weight
    d <owner> <u> <plf>                  u -> owner weight

Manifest files::

    tdsp-manifest 1
    fingerprint <hex>
    budget <N> <strategy>
    s <i> <j> <weight> <utility> <probability>
    f <plf>                              i -> j
    r <plf>                              j -> i

A ``<plf>`` is ``<k> <t1> <c1> ... <tk> <ck> | <via1> ...`` (``| -`` when the
function carries no provenance, ``none`` when there is no path).  Floats are
written with ``repr`` so loading restores them exactly.
"""
from __future__ import annotations

from pathlib import Path

from .decomposition import TreeDecomposition, TreeNode
from .errors import GraphFormatError, TDSPError
from .graph import dump_graph, parse_graph
from .plf import PLF
from .shortcuts import PairInstance, SelectionResult

INDEX_MAGIC = "tdsp-index"
MANIFEST_MAGIC = "tdsp-manifest"
VERSION = 1


class IndexFormatError(TDSPError):
    pass


def _num(x: float) -> str:
    return repr(float(x))


def format_labelled(f: PLF | None) -> str:
    if f is None:
        return "none"
    parts = [str(len(f))]
    for t, c in zip(f.t.tolist(), f.c.tolist()):
        parts.append(_num(t))
        parts.append(_num(c))
    parts.append("|")
    parts.extend(["-"] if f.via is None else map(str, f.via.tolist()))
    return " ".join(parts)


def parse_labelled(tokens: list[str]) -> PLF | None:
    if tokens == ["none"]:
        return None
    k = int(tokens[0])
    vals = [float(x) for x in tokens[1:1 + 2 * k]]
    if tokens[1 + 2 * k] != "|":
        raise IndexFormatError("missing provenance separator")
    rest = tokens[2 + 2 * k:]
    via = None if rest == ["-"] else [int(x) for x in rest]
    return PLF(vals[0::2], vals[1::2], via)


def _header(lines, magic: str) -> str:
    first = next(lines, "").split()
    if len(first) != 2 or first[0] != magic:
        raise IndexFormatError(f"not a {magic} file")
    if int(first[1]) != VERSION:
        raise IndexFormatError(f"unsupported {magic} version {first[1]}")
    fp = next(lines, "").split()
    if len(fp) != 2 or fp[0] != "fingerprint":
        raise IndexFormatError("missing fingerprint line")
    return fp[1]


# -- index --------------------------------------------------------------------

def dump_index(tree: TreeDecomposition) -> str:
    out = [f"{INDEX_MAGIC} {VERSION}", f"fingerprint {tree.fingerprint}"]
    out.append(dump_graph(tree.graph).rstrip("\n"))
    out.append("order " + " ".join(map(str, tree.sequence)))
    for v in tree.sequence:
        node = tree.nodes[v]
        out.append("x " + " ".join(map(str, node.bag)))
        for u in node.others:
            if node.ws[u] is not None:
                out.append(f"s {v} {u} {format_labelled(node.ws[u])}")
            if node.wd[u] is not None:
                out.append(f"d {v} {u} {format_labelled(node.wd[u])}")
    return "\n".join(out) + "\n"


def write_index(tree: TreeDecomposition, path) -> None:
    Path(path).write_text(dump_index(tree), encoding="utf-8")


def _parse_index(text: str) -> TreeDecomposition:
    lines = iter(text.splitlines())
    fp = _header(lines, INDEX_MAGIC)
    graph_lines, rest = [], []
    for line in lines:
        (graph_lines if line[:2] in ("p ", "a ", "c ") else rest).append(line)
    try:
        graph = parse_graph("\n".join(graph_lines))
    except GraphFormatError as exc:
        raise IndexFormatError(f"embedded graph: {exc}") from None
    nodes: list[TreeNode | None] = [None] * (graph.n + 1)
    sequence: list[int] = []
    for line in rest:
        tok = line.split()
        if not tok:
            continue
        kind = tok[0]
        if kind == "order":
            sequence = [int(x) for x in tok[1:]]
        elif kind == "x":
            bag = [int(x) for x in tok[1:]]
            v = bag[0]
            nodes[v] = TreeNode(v, bag, {u: None for u in bag[1:]},
                                {u: None for u in bag[1:]}, 0)
        elif kind in ("s", "d"):
            v, u = int(tok[1]), int(tok[2])
            table = nodes[v].ws if kind == "s" else nodes[v].wd
            if u not in table:
                raise IndexFormatError(f"weight {v}/{u} names a vertex outside the bag")
            table[u] = parse_labelled(tok[3:])
        else:
            raise IndexFormatError(f"unknown index record {kind!r}")
    if sorted(sequence) != list(range(1, graph.n + 1)) or any(x is None for x in nodes[1:]):
        raise IndexFormatError("index does not cover every vertex")
    rank = {v: k for k, v in enumerate(sequence)}
    for v in sequence:
        node = nodes[v]
        if any(rank[u] <= rank[v] for u in node.others):
            raise IndexFormatError(f"bag of {v} holds a vertex eliminated before it")
        node.order = rank[v]
        if node.others:
            node.parent = nodes[min(node.others, key=rank.__getitem__)]
            node.parent.children.append(node)
            if not set(node.others) <= set(node.parent.bag):
                raise IndexFormatError(f"bag of {v} is not covered by its parent")
    tree = TreeDecomposition(graph, nodes, sequence)
    if tree.fingerprint != fp:
        raise IndexFormatError("fingerprint mismatch; index file is corrupt")
    return tree


def parse_index(text: str) -> TreeDecomposition:
    try:
        return _parse_index(text)
    except (ValueError, IndexError, KeyError, AttributeError) as exc:
        raise IndexFormatError(f"malformed index: {exc}") from None


def read_index(path) -> TreeDecomposition:
    return parse_index(Path(path).read_text(encoding="utf-8"))


# -- manifest -----------------------------------------------------------------

def dump_manifest(sel: SelectionResult) -> str:
    out = [f"{MANIFEST_MAGIC} {VERSION}", f"fingerprint {sel.fingerprint}",
           f"budget {sel.budget} {sel.strategy or '-'}"]
    for p in sel.selected:
        out.append(f"s {p.i} {p.j} {p.weight} {_num(p.utility)} {_num(p.probability)}")
        out.append("f " + format_labelled(p.fwd))
        out.append("r " + format_labelled(p.bwd))
    return "\n".join(out) + "\n"


def write_manifest(sel: SelectionResult, path) -> None:
    Path(path).write_text(dump_manifest(sel), encoding="utf-8")


def _parse_manifest(text: str) -> SelectionResult:
    lines = iter(text.splitlines())
    fp = _header(lines, MANIFEST_MAGIC)
    head = next(lines, "").split()
    if len(head) != 3 or head[0] != "budget":
        raise IndexFormatError("missing budget line")
    pairs: list[PairInstance] = []
    for line in lines:
        tok = line.split()
        if not tok:
            continue
        if tok[0] == "s":
            i, j, w = int(tok[1]), int(tok[2]), int(tok[3])
            pairs.append(PairInstance(i, j, None, None, float(tok[4]), float(tok[5]), w))
        elif tok[0] in ("f", "r") and pairs:
            f = parse_labelled(tok[1:])
            if tok[0] == "f":
                pairs[-1].fwd = f
            else:
                pairs[-1].bwd = f
        else:
            raise IndexFormatError(f"unexpected manifest line {line[:40]!r}")
    strategy = "" if head[2] == "-" else head[2]
    return SelectionResult(pairs, int(head[1]), fp, strategy)


def parse_manifest(text: str) -> SelectionResult:
    try:
        return _parse_manifest(text)
    except (ValueError, IndexError) as exc:
        raise IndexFormatError(f"malformed manifest: {exc}") from None


def read_manifest(path) -> SelectionResult:
    return parse_manifest(Path(path).read_text(encoding="utf-8"))
