import io

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bilink import (
    BipartiteGraph,
    EdgeSet,
    GraphError,
    ParseError,
    candidate_array,
    candidate_pairs,
    degree,
    has_edge,
    left,
    parse_edge_list,
    remove_edges,
    right,
)
from bilink.bigraph import format_edge_list, nonedge_mask
from conftest import node_ids


@st.composite
def graphs(draw, max_side=8):
    nl = draw(st.integers(1, max_side))
    nr = draw(st.integers(1, max_side))
    cells = draw(st.sets(st.tuples(st.integers(0, nl - 1), st.integers(0, nr - 1))))
    return BipartiteGraph.from_edges(nl, nr, sorted(cells))


def check_structure(g):
    for i in range(g.n_left):
        adj = g.adj_left(i)
        assert np.all(np.diff(adj) > 0)
        for j in adj:
            assert i in g.adj_right(j)
    for j in range(g.n_right):
        adj = g.adj_right(j)
        assert np.all(np.diff(adj) > 0)
        for i in adj:
            assert j in g.adj_left(i)
    assert g.left_degrees.sum() == g.right_degrees.sum() == g.m


def test_fixture_shape(g_fix):
    assert (g_fix.n_left, g_fix.n_right, g_fix.m) == (3, 3, 6)
    check_structure(g_fix)


def test_degree_on_fixture(g_fix):
    _, r = node_ids(g_fix)
    assert degree(g_fix, right(r["b2"])) == 3


def test_degree_of_isolated_node():
    g = BipartiteGraph.from_edges(2, 2, [(0, 0)])
    assert degree(g, left(1)) == 0
    assert degree(g, right(1)) == 0


def test_degree_invalid_node(g_fix):
    with pytest.raises(GraphError):
        degree(g_fix, left(3))
    with pytest.raises(GraphError):
        degree(g_fix, right(-1))


def test_has_edge(g_fix):
    lft, rgt = node_ids(g_fix)
    assert has_edge(g_fix, lft["a1"], rgt["b1"])
    assert not has_edge(g_fix, lft["a1"], rgt["b3"])


def test_has_edge_on_empty_graph():
    g = BipartiteGraph.from_edges(0, 0, [])
    with pytest.raises(GraphError):
        has_edge(g, 0, 0)


def test_remove_edges(g_fix):
    lft, rgt = node_ids(g_fix)
    h = remove_edges(g_fix, EdgeSet([(lft["a1"], rgt["b1"])]))
    assert degree(h, left(lft["a1"])) == 1
    assert h.m == 5
    assert g_fix.m == 6  # original untouched
    assert remove_edges(g_fix, EdgeSet([])).edges() == g_fix.edges()
    empty = remove_edges(g_fix, g_fix.edges())
    assert (empty.m, empty.n_left, empty.n_right) == (0, 3, 3)


def test_remove_missing_edge(g_fix):
    lft, rgt = node_ids(g_fix)
    with pytest.raises(GraphError):
        remove_edges(g_fix, EdgeSet([(lft["a1"], rgt["b3"])]))


def test_candidate_pairs(g_fix):
    pairs = list(candidate_pairs(g_fix))
    assert len(pairs) == 3
    assert pairs == sorted(pairs)
    assert all(not has_edge(g_fix, x, y) for x, y in pairs)
    assert np.array_equal(candidate_array(g_fix), np.array(pairs))


def test_candidate_pairs_complete():
    g = BipartiteGraph.from_edges(3, 4, [(i, j) for i in range(3) for j in range(4)])
    assert list(candidate_pairs(g)) == []


def test_parse_report():
    text = "# comment\nu1\ti1\t5\t881250949\nu1\ti1\t3\t1\nu2\ti1\n\nu2\ti2\n"
    g, rep = parse_edge_list(text)
    assert (g.n_left, g.n_right, g.m) == (2, 2, 3)
    assert rep.duplicates == 1
    assert rep.records == 4
    assert rep.extra_columns == 2
    assert rep.lines_read == 6
    assert g.left_labels == ("u1", "u2")


def test_parse_duplicates_collapse():
    g, rep = parse_edge_list("u1 i1\nu1 i1\n", delimiter=None)
    assert g.m == 1 and rep.duplicates == 1


def test_parse_header_and_stream():
    g, _ = parse_edge_list(io.StringIO("left,right\nx,y\n"), delimiter=",", header=True)
    assert g.left_labels == ("x",) and g.right_labels == ("y",)


def test_parse_errors():
    with pytest.raises(ParseError, match="line 2"):
        parse_edge_list("a\tb\nlonely\n")
    with pytest.raises(ParseError):
        parse_edge_list("")
    with pytest.raises(ParseError):
        parse_edge_list("# only a comment\n")


def test_labels_lookup(g_fix):
    lft, _ = node_ids(g_fix)
    from bilink import Partition

    assert g_fix.node(Partition.LEFT, "a2") == left(lft["a2"])
    assert g_fix.label(left(lft["a2"])) == "a2"


def test_edge_set_rejects_duplicates():
    with pytest.raises(GraphError):
        EdgeSet([(0, 1), (0, 1)])


def test_from_edges_range_check():
    with pytest.raises(GraphError):
        BipartiteGraph.from_edges(1, 1, [(0, 1)])


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_round_trip(g):
    if g.m == 0:
        return
    h, _ = parse_edge_list(format_edge_list(g, ["round trip"]))
    # isolated nodes are not representable; compare by label
    got = {(h.left_labels[a], h.right_labels[b]) for a, b in h.edge_array()}
    want = {(str(a), str(b)) for a, b in g.edge_array()}
    assert got == want
    deg_h = {h.left_labels[i]: d for i, d in enumerate(h.left_degrees)}
    assert all(deg_h.get(str(i), 0) == d for i, d in enumerate(g.left_degrees))


@settings(max_examples=150, deadline=None)
@given(graphs(), st.data())
def test_symmetry_after_removal(g, data):
    edges = list(g.edges())
    pick = data.draw(st.sets(st.sampled_from(edges))) if edges else set()
    h = remove_edges(g, EdgeSet(sorted(pick)))
    check_structure(h)
    assert h.m == g.m - len(pick)
    assert h.shape == g.shape


@settings(max_examples=150, deadline=None)
@given(graphs())
def test_candidates_partition_grid(g):
    cand = {tuple(p) for p in candidate_pairs(g)}
    edges = set(g.edges())
    assert not cand & edges
    assert len(cand) + len(edges) == g.n_left * g.n_right
    assert nonedge_mask(g).sum() == len(cand)


def test_checksum_stable(g_fix):
    other, _ = parse_edge_list(format_edge_list(g_fix))
    assert other.checksum() == g_fix.checksum()
