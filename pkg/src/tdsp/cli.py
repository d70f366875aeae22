"""``tdsp`` command line interface.

Exit codes: 0 success, 1 other errors, 2 malformed input, 3 disconnected
graph, 4 unknown edge in an update.
"""
from __future__ import annotations

import functools
import sys
from pathlib import Path

import click

from . import bench as bench_mod
from .decomposition import build_tfp_tree
from .errors import (DisconnectedGraph, FIFOViolation, GraphFormatError, StaleSelection,
                     TDSPError, UnknownEdge, Unreachable)
from .graph import check_graph, dump_queries, generate_graph, load_graph, load_queries, parse_plf, write_graph
from .index_io import IndexFormatError, read_index, read_manifest, write_index, write_manifest
from .query import basic_query
from .shortcut_query import query_with_shortcuts
from .shortcuts import budget_from_fraction, build_all_candidates, select_dp, select_greedy, update_edge

EXIT_MALFORMED = 2
EXIT_DISCONNECTED = 3
EXIT_MISSING_EDGE = 4
SYNTHETIC_NOTE = "note: edge profiles are synthetic diurnal curves, not measured traffic"


def _guard(fn):
    @functools.wraps(fn)
    def wrapper(*args, **kwargs):
        try:
            return fn(*args, **kwargs)
        except (GraphFormatError, FIFOViolation, IndexFormatError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_MALFORMED)
        except DisconnectedGraph as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_DISCONNECTED)
        except UnknownEdge as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(EXIT_MISSING_EDGE)
        except (TDSPError, OSError) as exc:
            click.echo(f"error: {exc}", err=True)
            sys.exit(1)
    return wrapper


@click.group()
@click.version_option(package_name="artifact")
def main():
    """Time-dependent shortest paths over a tree-decomposition index."""


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.argument("index", type=click.Path(dir_okay=False))
@_guard
def build(graph, index):
    """Decompose GRAPH and write the index to INDEX."""
    g = load_graph(graph)
    tree = build_tfp_tree(g)
    write_index(tree, index)
    click.echo(f"n={g.n} m={g.m} treewidth={tree.treewidth} treeheight={tree.treeheight}")


@main.command()
@click.argument("index", type=click.Path(exists=True, dir_okay=False))
@click.option("--budget", "-N", type=int, help="Budget in breakpoints.")
@click.option("--budget-frac", type=float, help="Budget as a fraction of total candidate weight.")
@click.option("--strategy", type=click.Choice(["dp", "greedy"]), default="greedy", show_default=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), required=True)
@_guard
def select(index, budget, budget_frac, strategy, out):
    """Build all shortcut candidates and keep a subset within the budget."""
    if (budget is None) == (budget_frac is None):
        raise click.UsageError("give exactly one of --budget and --budget-frac")
    tree = read_index(index)
    cands = build_all_candidates(tree)
    n_budget = budget if budget is not None else budget_from_fraction(cands, budget_frac)
    sel = (select_dp if strategy == "dp" else select_greedy)(cands, n_budget)
    write_manifest(sel, out)
    click.echo(f"candidates={len(cands)} total_weight={cands.total_weight} budget={n_budget} "
               f"selected={len(sel)} weight={sel.total_weight} utility={sel.total_utility!r}")


def _answer(tree, sel, q, mode, path):
    t = q.t if mode == "scalar" else None
    if sel is None:
        return basic_query(tree, q.s, q.d, t, with_path=path)
    return query_with_shortcuts(tree, sel, q.s, q.d, t, with_path=path)


@main.command()
@click.argument("index", type=click.Path(exists=True, dir_okay=False))
@click.argument("queries", type=click.Path(exists=True, dir_okay=False))
@click.option("--manifest", "-m", type=click.Path(exists=True, dir_okay=False))
@click.option("--mode", type=click.Choice(["scalar", "profile"]), default="scalar", show_default=True)
@click.option("--path/--no-path", default=False, help="Print the vertex path (scalar mode).")
@_guard
def query(index, queries, manifest, mode, path):
    """Answer each ``q s d t`` line of QUERIES.

    Scalar output: ``s d t cost [path...]``.  Profile output:
    ``s d k t1 c1 ... tk ck``.  Unreachable pairs print ``UNREACHABLE``.
    """
    tree = read_index(index)
    sel = read_manifest(manifest) if manifest else None
    for q in load_queries(queries):
        try:
            res = _answer(tree, sel, q, mode, path and mode == "scalar")
        except Unreachable:
            click.echo(f"{q.s} {q.d} {q.t!r} UNREACHABLE")
            continue
        if mode == "scalar":
            line = f"{q.s} {q.d} {q.t!r} {res.cost!r}"
            if path:
                line += " " + " ".join(map(str, res.path))
        else:
            pts = " ".join(f"{t!r} {c!r}" for t, c in res.profile.points)
            line = f"{q.s} {q.d} {len(res.profile)} {pts}"
        click.echo(line)


@main.command()
@click.argument("index", type=click.Path(exists=True, dir_okay=False))
@click.argument("queries", type=click.Path(exists=True, dir_okay=False))
@click.option("--manifest", "-m", "manifests", multiple=True,
              type=click.Path(exists=True, dir_okay=False))
@click.option("--basic/--no-basic", default=True, show_default=True)
@click.option("--oracle/--no-oracle", default=False, show_default=True)
@click.option("--mode", type=click.Choice(["scalar", "profile"]), default="scalar", show_default=True)
@click.option("--repeat", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--threads", type=click.IntRange(min=1), default=None,
              help=f"Worker threads (default ${bench_mod.THREADS_ENV} or 1).")
@click.option("--out", "-o", type=click.File("w"), default="-")
@_guard
def bench(index, queries, manifests, basic, oracle, mode, repeat, threads, out):
    """Time queries under the basic method and each manifest; write CSV."""
    tree = read_index(index)
    qs = load_queries(queries)
    methods = {"basic": None} if basic else {}
    for path in manifests:
        sel = read_manifest(path)
        name = f"{sel.strategy or 'manual'}-shortcuts"
        if name in methods:
            name = f"{name}:{sel.budget}"
        methods[name] = sel
    records = bench_mod.run_bench(tree, qs, methods, mode=mode, oracle=oracle, repeat=repeat,
                                  threads=threads)
    bench_mod.write_csv(records, out)
    for name, row in bench_mod.summarize(records).items():
        click.echo(f"{name}: median={row['median_us']:.1f}us mean={row['mean_us']:.1f}us "
                   f"correct={row['correct']:.3f}", err=True)


@main.group()
def gen():
    """Generate synthetic graphs and query workloads."""


@gen.command("graph")
@click.option("--n", type=int, required=True)
@click.option("--degree", type=float, default=3.0, show_default=True)
@click.option("--c", "c", type=click.IntRange(1, 64), default=3, show_default=True,
              help="Breakpoints per edge.")
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), required=True)
@_guard
def gen_graph(n, degree, c, seed, out):
    """Random connected graph with two-way roads."""
    g = generate_graph(n, degree, c, seed)
    write_graph(g, out)
    click.echo(f"n={g.n} m={g.m}")
    click.echo(SYNTHETIC_NOTE, err=True)


@gen.command("city")
@click.option("--n", type=int, required=True)
@click.option("--core", type=int, default=6, show_default=True)
@click.option("--c", "c", type=click.IntRange(1, 64), default=3, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), required=True)
@_guard
def gen_city(n, core, c, seed, out):
    """Grid-like network: arterial grid plus local street trees."""
    g = bench_mod.generate_grid_city(n, core=core, c=c, seed=seed)
    write_graph(g, out)
    click.echo(f"n={g.n} m={g.m}")
    click.echo(SYNTHETIC_NOTE, err=True)


@gen.command("queries")
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@click.option("--pairs", type=click.IntRange(min=1), default=1000, show_default=True)
@click.option("--intervals", type=click.IntRange(min=1), default=10, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", "-o", type=click.Path(dir_okay=False), required=True)
@_guard
def gen_queries(graph, pairs, intervals, seed, out):
    """PAIRS random vertex pairs, one departure per interval of the day."""
    g = load_graph(graph)
    qs = bench_mod.gen_queries(g.n, pairs, intervals, seed, g.domain)
    Path(out).write_text(dump_queries(qs), encoding="utf-8")
    click.echo(f"queries={len(qs)}")


def _load_updates(path):
    out = []
    for no, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
        tok = raw.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] != "u" or len(tok) < 5:
            raise GraphFormatError("update lines look like 'u <u> <v> <k> <t1> <c1> ...'", no)
        try:
            u, v = int(tok[1]), int(tok[2])
        except ValueError:
            raise GraphFormatError("non-numeric endpoint", no) from None
        f, rest = parse_plf(tok[3:], no)
        if rest:
            raise GraphFormatError("trailing tokens", no)
        if not f.is_fifo():
            raise FIFOViolation(f"line {no}: new weight of {u}->{v} violates FIFO")
        out.append((u, v, f))
    return out


@main.command()
@click.argument("index", type=click.Path(exists=True, dir_okay=False))
@click.argument("updates", type=click.Path(exists=True, dir_okay=False))
@click.option("--manifest", "-m", type=click.Path(exists=True, dir_okay=False))
@_guard
def update(index, updates, manifest):
    """Apply edge re-weightings from UPDATES to INDEX (and MANIFEST) in place."""
    changes = _load_updates(updates)
    if not changes:
        click.echo("updates=0")
        return
    tree = read_index(index)
    sel = read_manifest(manifest) if manifest else None
    if sel is not None and sel.fingerprint != tree.fingerprint:
        raise StaleSelection("manifest does not belong to this index")
    touched = set()
    for u, v, f in changes:
        if sel is not None:
            touched |= update_edge(tree, sel, u, v, f)
        else:
            touched |= tree.update_edge(u, v, f)
    write_index(tree, index)
    if sel is not None:
        write_manifest(sel, manifest)
    click.echo(f"updates={len(changes)} nodes_changed={len(touched)}")


@main.command()
@click.argument("graph", type=click.Path(exists=True, dir_okay=False))
@_guard
def validate(graph):
    """Check GRAPH and list every violation."""
    report = check_graph(graph)
    for v in report.violations:
        click.echo(v)
    g = report.graph
    if report.ok and not g.is_connected():
        click.echo("graph is not connected")
        sys.exit(EXIT_DISCONNECTED)
    if not report.ok:
        sys.exit(EXIT_MALFORMED)
    click.echo(f"ok n={g.n} m={g.m}")


if __name__ == "__main__":
    main()
