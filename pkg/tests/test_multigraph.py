"""Multigraph storage invariants and edge-list serialization."""

import numpy as np
import pytest

from ultrasmall.multigraph import MultiGraph, read_edge_list


def test_from_pairs_self_loop_counts_twice():
    # vertex 0 with a self-loop (slots 0-1) and one edge to vertex 1
    g = MultiGraph.from_pairs([3, 1], [(0, 1), (2, 3)])
    assert g.degree(0) == 3
    assert g.degree(1) == 1
    assert sorted(g.neighbors(0).tolist()) == [0, 0, 1]
    assert g.num_edges == 2


def test_partner_involution():
    rng = np.random.default_rng(0)
    deg = np.array([3, 3, 2, 2, 2])
    perm = rng.permutation(int(deg.sum()))
    g = MultiGraph.from_pairs(deg, perm.reshape(-1, 2))
    slots = np.arange(g.num_half_edges)
    assert np.array_equal(g.partner[g.partner], slots)
    assert np.all(g.partner != slots)
    assert np.array_equal(g.degrees, deg)


def test_from_edge_list_matches_from_pairs():
    edges = [(0, 1), (1, 2), (2, 2), (0, 1)]
    g = MultiGraph.from_edge_list(3, edges)
    assert g.degree(0) == 2
    assert g.degree(1) == 3
    assert g.degree(2) == 3  # one incident edge + self-loop
    got = sorted(map(tuple, np.sort(g.edges(), axis=1).tolist()))
    assert got == sorted(map(tuple, (np.sort(edges, axis=1).tolist())))


def test_edges_lists_each_edge_once():
    g = MultiGraph.from_pairs([2, 2], [(0, 2), (1, 3)])
    assert len(g.edges()) == 2


def test_edge_list_roundtrip(tmp_path):
    edges = [(0, 1), (1, 2), (3, 3)]
    g = MultiGraph.from_edge_list(5, edges)  # vertex 4 isolated
    path = tmp_path / "graph.txt"
    g.write_edge_list(path)
    # file format: header then 1-based pairs
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "# n 5"
    assert "4 4" in lines[1:]
    back = read_edge_list(path)
    assert back.n == 5
    assert np.array_equal(back.degrees, g.degrees)
    assert sorted(map(tuple, np.sort(back.edges(), axis=1).tolist())) == sorted(
        map(tuple, np.sort(g.edges(), axis=1).tolist())
    )


def test_read_edge_list_without_header(tmp_path):
    path = tmp_path / "plain.txt"
    path.write_text("1 2\n2 3\n")
    g = read_edge_list(path)
    assert g.n == 3
    assert g.num_edges == 2


def test_from_edge_list_range_check():
    with pytest.raises(ValueError):
        MultiGraph.from_edge_list(2, [(0, 2)])


def test_matching_key_distinguishes_pairings():
    a = MultiGraph.from_pairs([2, 2], [(0, 2), (1, 3)])
    b = MultiGraph.from_pairs([2, 2], [(0, 3), (1, 2)])
    c = MultiGraph.from_pairs([2, 2], [(2, 0), (3, 1)])
    assert a.matching_key() != b.matching_key()
    assert a.matching_key() == c.matching_key()
