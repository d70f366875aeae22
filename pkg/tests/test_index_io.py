import pytest

from helpers import random_graph
from tdsp.decomposition import build_tfp_tree
from tdsp.index_io import (IndexFormatError, dump_index, dump_manifest, parse_index,
                           parse_manifest, read_index, write_index)
from tdsp.query import basic_query
from tdsp.shortcut_query import query_with_shortcuts
from tdsp.shortcuts import build_all_candidates, budget_from_fraction, select_dp, select_greedy


@pytest.fixture(scope="module")
def tree():
    return build_tfp_tree(random_graph(7, n=25))


def test_index_text_round_trip_is_stable(tree):
    text = dump_index(tree)
    again = parse_index(text)
    assert dump_index(again) == text
    assert again.fingerprint == tree.fingerprint
    assert again.treewidth == tree.treewidth and again.treeheight == tree.treeheight
    assert again.root.owner == tree.root.owner


def test_loaded_index_answers_identically(tree, tmp_path):
    path = tmp_path / "idx.txt"
    write_index(tree, path)
    loaded = read_index(path)
    for s, d, t in [(1, 20, 100.0), (5, 3, 40000.0), (25, 2, 86399.0)]:
        assert basic_query(loaded, s, d, t).cost == basic_query(tree, s, d, t).cost
        assert basic_query(loaded, s, d, t).path == basic_query(tree, s, d, t).path
    assert basic_query(loaded, 4, 9).profile.same_as(basic_query(tree, 4, 9).profile)


def _edit(tree, prefix, fn):
    lines = dump_index(tree).splitlines()
    k = next(i for i, line in enumerate(lines) if line.startswith(prefix))
    lines[k] = fn(lines[k])
    return "\n".join(lines)


@pytest.mark.parametrize("prefix, fn", [
    ("a ", lambda line: line[:-1] + ("1" if line[-1] != "1" else "2")),  # weight changed
    ("order ", lambda line: "order " + " ".join(reversed(line.split()[1:]))),
    ("x ", lambda line: "x " + " ".join(reversed(line.split()[1:]))),
    ("s ", lambda line: "s 1 1 1 0.0 1.0 | -"),
    ("x ", lambda line: line + " x"),
])
def test_corrupt_index_is_rejected(tree, prefix, fn):
    with pytest.raises(IndexFormatError):
        parse_index(_edit(tree, prefix, fn))


@pytest.mark.parametrize("text", ["", "tdsp-index 9\nfingerprint x\n", "garbage\n"])
def test_bad_headers(text):
    with pytest.raises(IndexFormatError):
        parse_index(text)


@pytest.mark.parametrize("select", [select_dp, select_greedy])
def test_manifest_round_trip(tree, select):
    cands = build_all_candidates(tree)
    sel = select(cands, budget_from_fraction(cands, 0.4))
    text = dump_manifest(sel)
    back = parse_manifest(text)
    assert dump_manifest(back) == text
    assert back.budget == sel.budget and back.strategy == sel.strategy
    assert back.total_utility == sel.total_utility
    for s, d in [(1, 20), (7, 12), (25, 2)]:
        a = query_with_shortcuts(tree, sel, s, d, 3600.0)
        b = query_with_shortcuts(tree, back, s, d, 3600.0)
        assert a.cost == b.cost and a.case == b.case


def test_manifest_rejects_unknown_records(tree):
    with pytest.raises(IndexFormatError):
        parse_manifest(f"tdsp-manifest 1\nfingerprint {tree.fingerprint}\nbudget 3 dp\nzz 1\n")
