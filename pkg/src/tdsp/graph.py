"""Time-dependent directed graphs: model, text format, synthetic generation.

File format (line oriented, UTF-8)::

    c <comment>
    p td <n> <m> <t_begin> <t_end>
    a <u> <v> <k> <t1> <c1> ... <tk> <ck>

Query files hold one ``q <s> <d> <t>`` line per query.
"""
from __future__ import annotations

import io
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO, Iterable, Iterator

import numpy as np

from .errors import (DisconnectedGraph, DuplicateEdge, FIFOViolation, GraphFormatError,
                     InfeasibleParameters, UnknownEdge, UnknownVertex)
from .plf import DAY, FIFO_TOL, PLF


class TDGraph:
    """Directed graph on vertices ``1..n`` with a PLF weight per edge."""

    def __init__(self, n: int, edges: Iterable[tuple[int, int, PLF]] = (),
                 domain: tuple[float, float] = DAY):
        if n < 1:
            raise ValueError("graph needs at least one vertex")
        self.n = n
        self.domain = (float(domain[0]), float(domain[1]))
        self.out: list[dict[int, PLF]] = [{} for _ in range(n + 1)]
        self.inc: list[dict[int, PLF]] = [{} for _ in range(n + 1)]
        self.m = 0
        for u, v, w in edges:
            self._add(u, v, w)

    def _add(self, u: int, v: int, w: PLF) -> None:
        for x in (u, v):
            if not 1 <= x <= self.n:
                raise UnknownVertex(f"vertex {x} outside 1..{self.n}")
        if u == v:
            raise GraphFormatError(f"self-loop on vertex {u}")
        if v in self.out[u]:
            raise DuplicateEdge(f"duplicate edge {u}->{v}")
        if not w.is_fifo(FIFO_TOL):
            raise FIFOViolation(f"edge {u}->{v} violates FIFO")
        self.out[u][v] = w
        self.inc[v][u] = w
        self.m += 1

    def __repr__(self) -> str:
        return f"TDGraph(n={self.n}, m={self.m})"

    def vertices(self) -> range:
        return range(1, self.n + 1)

    def _check(self, v: int) -> None:
        if not 1 <= v <= self.n:
            raise UnknownVertex(f"vertex {v} outside 1..{self.n}")

    def out_edges(self, v: int) -> dict[int, PLF]:
        return self.out[v]

    def in_edges(self, v: int) -> dict[int, PLF]:
        return self.inc[v]

    def weight(self, u: int, v: int) -> PLF:
        try:
            return self.out[u][v]
        except (KeyError, IndexError):
            raise UnknownEdge(f"no edge {u}->{v}") from None

    def has_edge(self, u: int, v: int) -> bool:
        return 1 <= u <= self.n and v in self.out[u]

    def neighbors(self, v: int) -> set[int]:
        """Union of in- and out-neighbours."""
        self._check(v)
        return set(self.out[v]) | set(self.inc[v])

    def edges(self) -> Iterator[tuple[int, int, PLF]]:
        for u in range(1, self.n + 1):
            for v in sorted(self.out[u]):
                yield u, v, self.out[u][v]

    def with_weight(self, u: int, v: int, w: PLF) -> "TDGraph":
        """Copy of the graph with edge ``u->v`` re-weighted."""
        if not self.has_edge(u, v):
            raise UnknownEdge(f"no edge {u}->{v}")
        if not w.is_fifo(FIFO_TOL):
            raise FIFOViolation(f"edge {u}->{v} violates FIFO")
        g = TDGraph(self.n, domain=self.domain)
        g.out = [dict(d) for d in self.out]
        g.inc = [dict(d) for d in self.inc]
        g.m = self.m
        g.out[u][v] = w
        g.inc[v][u] = w
        return g

    def is_connected(self) -> bool:
        """Weak connectivity (direction ignored)."""
        seen = {1}
        stack = [1]
        while stack:
            v = stack.pop()
            for u in (*self.out[v], *self.inc[v]):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return len(seen) == self.n

    def require_connected(self) -> None:
        if not self.is_connected():
            raise DisconnectedGraph("graph is not connected")


@dataclass(frozen=True)
class Query:
    s: int
    d: int
    t: float


@dataclass
class LoadReport:
    graph: TDGraph | None
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


# ---------------------------------------------------------------------------
# text format

def _fmt(x: float) -> str:
    if float(x).is_integer() and abs(x) < 1e15:
        return str(int(x))
    return repr(float(x))


def format_plf(w: PLF) -> str:
    parts = [str(len(w))]
    for t, c in w.points:
        parts.append(_fmt(t))
        parts.append(_fmt(c))
    return " ".join(parts)


def parse_plf(tokens: list[str], line: int | None = None) -> tuple[PLF, list[str]]:
    """Parse ``k t1 c1 ... tk ck`` from the head of ``tokens``; return the rest."""
    try:
        k = int(tokens[0])
        vals = [float(x) for x in tokens[1:1 + 2 * k]]
    except (ValueError, IndexError):
        raise GraphFormatError("malformed breakpoint list", line) from None
    if k < 1 or len(vals) != 2 * k:
        raise GraphFormatError(f"expected {k} breakpoints", line)
    ts, cs = vals[0::2], vals[1::2]
    if any(b <= a for a, b in zip(ts, ts[1:])):
        raise GraphFormatError("breakpoint times must be strictly increasing", line)
    if any(c < 0 or not math.isfinite(c) for c in cs):
        raise GraphFormatError("costs must be finite and non-negative", line)
    return PLF(ts, cs), tokens[1 + 2 * k:]


def _open_text(source) -> IO[str]:
    if isinstance(source, (str, os.PathLike)):
        return open(source, encoding="utf-8")
    if isinstance(source, (bytes, bytearray)):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, io.TextIOBase):
        return source
    return io.TextIOWrapper(source, encoding="utf-8")


def _parse(lines: Iterable[str], strict: bool) -> LoadReport:
    violations: list[str] = []
    header = None
    edges: list[tuple[int, int, PLF]] = []
    seen: set[tuple[int, int]] = set()

    def fail(exc: Exception) -> None:
        if strict:
            raise exc
        violations.append(str(exc))

    for no, raw in enumerate(lines, start=1):
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "p":
            if header is not None:
                fail(GraphFormatError("duplicate header", no))
                continue
            if len(tok) != 6 or tok[1] != "td":
                raise GraphFormatError("header must be 'p td <n> <m> <t_begin> <t_end>'", no)
            try:
                header = (int(tok[2]), int(tok[3]), float(tok[4]), float(tok[5]))
            except ValueError:
                raise GraphFormatError("non-numeric header field", no) from None
            if header[0] < 1 or header[3] <= header[2]:
                raise GraphFormatError("invalid vertex count or time domain", no)
            continue
        if tok[0] != "a":
            fail(GraphFormatError(f"unknown line type {tok[0]!r}", no))
            continue
        if header is None:
            raise GraphFormatError("edge before header", no)
        try:
            u, v = int(tok[1]), int(tok[2])
        except (ValueError, IndexError):
            fail(GraphFormatError("malformed edge endpoints", no))
            continue
        try:
            w, rest = parse_plf(tok[3:], no)
        except GraphFormatError as exc:
            fail(exc)
            continue
        if rest:
            fail(GraphFormatError("trailing tokens", no))
            continue
        n, _, lo, hi = header
        if not (1 <= u <= n and 1 <= v <= n):
            fail(GraphFormatError(f"vertex id outside 1..{n}", no))
            continue
        if u == v:
            fail(GraphFormatError(f"self-loop on vertex {u}", no))
            continue
        if w.t[0] < lo or w.t[-1] > hi:
            fail(GraphFormatError("breakpoint outside the time domain", no))
            continue
        if (u, v) in seen:
            fail(DuplicateEdge(f"duplicate edge {u}->{v}", no))
            continue
        if not w.is_fifo(0.0):
            fail(FIFOViolation(f"line {no}: edge {u}->{v} violates FIFO"))
            continue
        seen.add((u, v))
        edges.append((u, v, w))
    if header is None:
        raise GraphFormatError("missing 'p td' header")
    n, m, lo, hi = header
    if len(edges) != m and not violations:
        fail(GraphFormatError(f"header announces {m} edges, found {len(edges)}"))
    return LoadReport(TDGraph(n, edges, (lo, hi)), violations)


def load_graph(source) -> TDGraph:
    """Strictly parse a graph; raises on the first violation."""
    f = _open_text(source)
    try:
        return _parse(f, strict=True).graph
    finally:
        if f is not source:
            f.close()


def check_graph(source) -> LoadReport:
    """Lenient parse: collect violations, keep the valid edges."""
    f = _open_text(source)
    try:
        return _parse(f, strict=False)
    finally:
        if f is not source:
            f.close()


def parse_graph(text: str) -> TDGraph:
    return _parse(text.splitlines(), strict=True).graph


def dump_graph(g: TDGraph) -> str:
    lines = [f"p td {g.n} {g.m} {_fmt(g.domain[0])} {_fmt(g.domain[1])}"]
    for u, v, w in g.edges():
        lines.append(f"a {u} {v} {format_plf(w)}")
    return "\n".join(lines) + "\n"


def write_graph(g: TDGraph, path) -> None:
    Path(path).write_text(dump_graph(g), encoding="utf-8")


def load_queries(source) -> list[Query]:
    f = _open_text(source)
    out = []
    try:
        for no, raw in enumerate(f, start=1):
            tok = raw.split()
            if not tok or tok[0] == "c":
                continue
            if tok[0] != "q" or len(tok) != 4:
                raise GraphFormatError("query lines look like 'q <s> <d> <t>'", no)
            try:
                out.append(Query(int(tok[1]), int(tok[2]), float(tok[3])))
            except ValueError:
                raise GraphFormatError("non-numeric query field", no) from None
    finally:
        if f is not source:
            f.close()
    return out


def dump_queries(queries: Iterable[Query]) -> str:
    return "".join(f"q {q.s} {q.d} {_fmt(q.t)}\n" for q in queries)


# ---------------------------------------------------------------------------
# synthetic graphs

def diurnal_plf(rng: np.random.Generator, c: int, domain=DAY,
                base_range=(30.0, 900.0)) -> PLF:
    """Random FIFO-safe daily profile with exactly ``c`` breakpoints.

    Log-uniform base cost, sinusoidal day-long swing with per-point noise,
    slopes clipped at -0.9.
    """
    lo, hi = domain
    base = math.exp(rng.uniform(math.log(base_range[0]), math.log(base_range[1])))
    if c == 1:
        return PLF([lo], [round(base, 3)])
    span = (hi - lo) / (c - 1)
    ts = [lo]
    for k in range(1, c - 1):
        ts.append(round(lo + k * span + rng.uniform(-0.3, 0.3) * span))
    ts.append(hi)
    amp = rng.uniform(0.1, 0.6)
    phase = rng.uniform(0, 2 * math.pi)
    cs = []
    for t in ts:
        swing = 1 + amp * math.sin(2 * math.pi * (t - lo) / (hi - lo) + phase)
        cs.append(base * swing * (1 + rng.uniform(-0.2, 0.2)))
    for k in range(1, c):
        cs[k] = max(cs[k], cs[k - 1] - 0.9 * (ts[k] - ts[k - 1]))
    return PLF(ts, [round(x, 3) for x in cs])


def generate_graph(n: int, avg_degree: float, c: int = 3, seed: int = 0,
                   domain=DAY) -> TDGraph:
    """Connected random graph with about ``n * avg_degree`` directed edges.

    Roads are two-way: every undirected pair yields two directed edges with
    independent profiles.
    """
    if n < 2 or not 1 <= c <= 64:
        raise InfeasibleParameters("need n >= 2 and 1 <= c <= 64")
    target_pairs = round(n * avg_degree / 2)
    if target_pairs < n - 1 - 0.1 * (n - 1) or target_pairs > n * (n - 1) // 2:
        raise InfeasibleParameters(f"avg_degree {avg_degree} infeasible for n={n}")
    target_pairs = max(target_pairs, n - 1)
    rng = np.random.default_rng(seed)
    label = rng.permutation(n) + 1
    pairs: set[tuple[int, int]] = set()
    for v in range(1, n):
        u = int(rng.integers(0, v))
        a, b = int(label[u]), int(label[v])
        pairs.add((min(a, b), max(a, b)))
    while len(pairs) < target_pairs:
        a, b = (int(x) for x in rng.integers(1, n + 1, size=2))
        if a != b:
            pairs.add((min(a, b), max(a, b)))
    edges = []
    for a, b in sorted(pairs):
        edges.append((a, b, diurnal_plf(rng, c, domain)))
        edges.append((b, a, diurnal_plf(rng, c, domain)))
    return TDGraph(n, edges, domain)
