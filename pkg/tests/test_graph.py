import io

import networkx as nx
import numpy as np
import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from percis.graph import (EdgeListError, Graph, bfs_distances, connected_components,
                          from_networkx, grid_graph, load_edge_list, parse_edge_list,
                          path_graph, vertex_diameter_ub, write_edge_list)
from percis.estimators import _all_shortest_paths

from conftest import star


def test_load_two_edge_path():
    g = parse_edge_list("0 1\n1 2", directed=True)
    assert (g.n, g.m) == (3, 2)
    assert g.out_neighbors(0).tolist() == [1]
    assert g.in_neighbors(2).tolist() == [1]


def test_load_collapses_duplicates_undirected():
    g = parse_edge_list("# c\n5 7\n7 5", directed=False)
    assert (g.n, g.m) == (2, 1)
    assert g.out_neighbors(0).tolist() == [1]
    assert g.out_neighbors(1).tolist() == [0]
    assert g.labels.tolist() == [5, 7]


def test_self_loop_dropped_but_node_kept():
    g = parse_edge_list("3 3", directed=True)
    assert (g.n, g.m) == (1, 0)
    assert g.labels.tolist() == [3]


@pytest.mark.parametrize("text", ["0 1\nfoo bar\n", "0\n", "1 2 x\n0 z"])
def test_malformed_line_names_line_number(text):
    with pytest.raises(EdgeListError, match="line 2|line 1"):
        parse_edge_list(text, directed=True)


def test_empty_input_is_an_error():
    with pytest.raises(EdgeListError):
        parse_edge_list("# only a comment\n", directed=True)


def test_load_from_file(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# SNAP style\n10\t20\n20\t30\n")
    g = load_edge_list(p, directed=True)
    assert g.labels.tolist() == [10, 20, 30]
    assert g.edges().tolist() == [[0, 1], [1, 2]]


def test_forward_backward_consistent():
    g = from_networkx(nx.gnp_random_graph(30, 0.1, seed=2, directed=True))
    fwd = {(u, int(v)) for u in range(g.n) for v in g.out_neighbors(u)}
    bwd = {(int(u), v) for v in range(g.n) for u in g.in_neighbors(v)}
    assert fwd == bwd
    for u in range(g.n):
        nb = g.out_neighbors(u)
        assert np.all(np.diff(nb) > 0)


def test_bfs_path_forward_backward():
    g = path_graph(3)
    assert bfs_distances(g, 0, "forward").tolist() == [0, 1, 2]
    assert bfs_distances(g, 0, "backward").tolist() == [0, np.inf, np.inf]


def test_bfs_star():
    assert bfs_distances(star(3), 0).tolist() == [0, 1, 1, 1]


def test_components():
    g = Graph.from_edges(4, [(0, 1), (2, 3)], directed=False)
    assert len(set(connected_components(g).tolist())) == 2
    two_cycle = Graph.from_edges(2, [(0, 1), (1, 0)], directed=True)
    assert connected_components(two_cycle, "strong").tolist() == [0, 0]
    one_way = Graph.from_edges(2, [(0, 1)], directed=True)
    assert len(set(connected_components(one_way, "strong").tolist())) == 2


def test_components_ordered_by_size():
    g = Graph.from_edges(6, [(0, 1), (2, 3), (3, 4), (4, 5)], directed=False)
    comp = connected_components(g)
    assert comp.tolist() == [1, 1, 0, 0, 0, 0]


def test_vertex_diameter_examples():
    assert vertex_diameter_ub(path_graph(5, directed=False)) == 7
    assert vertex_diameter_ub(star(6)) == 1
    weak = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (4, 3)], directed=True)
    assert vertex_diameter_ub(weak) == 3
    assert vertex_diameter_ub(weak, override=2) == 2


def _true_max_internal(g):
    best = 0
    for s in range(g.n):
        for t, paths in _all_shortest_paths(g, s).items():
            if t != s:
                best = max(best, len(paths[0]) - 2)
    return best


@st.composite
def small_graphs(draw, max_n=12):
    n = draw(st.integers(2, max_n))
    directed = draw(st.booleans())
    pairs = st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
    edges = draw(st.lists(pairs, max_size=3 * n))
    return Graph.from_edges(n, edges, directed)


@settings(max_examples=150, deadline=None)
@given(small_graphs())
def test_vertex_diameter_is_an_upper_bound(g):
    assert vertex_diameter_ub(g) >= _true_max_internal(g)


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_n=20), st.data())
def test_bfs_triangle_property(g, data):
    s = data.draw(st.integers(0, g.n - 1))
    d = bfs_distances(g, s)
    for u, v in g.edges().tolist():
        assert d[v] <= d[u] + 1
        if not g.directed:
            assert d[u] <= d[v] + 1


@settings(max_examples=100, deadline=None)
@given(small_graphs(max_n=15), st.integers(0, 1000))
def test_edge_list_round_trip(g, offset):
    assume(g.m > 0)
    labels = np.arange(g.n) * 3 + offset
    g = Graph.from_edges(g.n, g.edges(), g.directed, labels=labels)
    buf = io.StringIO()
    write_edge_list(g, buf)
    back = parse_edge_list(buf.getvalue(), g.directed)
    # isolated nodes have no edge line, so compare the canonical labelled edge sets
    canon = {tuple(sorted(e)) if not g.directed else tuple(e) for e in g.labels[g.edges()].tolist()}
    again = {tuple(sorted(e)) if not g.directed else tuple(e) for e in back.labels[back.edges()].tolist()}
    assert canon == again


def test_grid_size():
    g = grid_graph(3, 4)
    assert (g.n, g.m) == (12, 17)
