import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bbsplit.graph import (DisconnectedGraphError, GraphError, GraphParseError, InvalidWeightError,
                           WeightedGraph, graph_from_spec, halve, load_graph, make_complete, make_cycle,
                           make_line, save_graph)


def test_line_two_vertices():
    g = make_line(2)
    assert g.edges == ((1, 2, 1.0),)
    assert g.ring_probs.tolist() == [1.0]


def test_line_four_vertices():
    g = make_line(4)
    assert [(v, w) for v, w, _ in g.edges] == [(1, 2), (2, 3), (3, 4)]
    np.testing.assert_allclose(g.ring_probs, [1 / 3] * 3)


def test_line_seven_for_walkthrough():
    g = make_line(7)
    assert g.n == 7 and g.m_edges == 6


def test_cycle_and_complete():
    c = make_cycle(3)
    assert c.m_edges == 3
    np.testing.assert_allclose(c.ring_probs, [1 / 3] * 3)
    k = make_complete(3)
    assert k.m_edges == 3 and all(r == 0.5 for _, _, r in k.edges)
    assert make_complete(2).edges == make_line(2).edges


def test_small_builders_rejected():
    with pytest.raises(GraphError):
        make_line(1)
    with pytest.raises(GraphError):
        make_cycle(2)


def test_halve():
    assert halve(make_line(2)).edges == ((1, 2, 0.5),)
    assert all(r == 0.5 for _, _, r in halve(make_cycle(3)).edges)
    g = WeightedGraph(3, ((1, 2, 2.0), (2, 3, 4.0)))
    assert [r for _, _, r in halve(g).edges] == [1.0, 2.0]


def test_halving_keeps_ring_distribution():
    g = WeightedGraph(3, ((1, 2, 2.0), (2, 3, 4.0)))
    np.testing.assert_allclose(halve(g).ring_probs, g.ring_probs)


def test_load_line():
    g = load_graph("n=2\n1 2 1.0")
    assert g.edges == make_line(2).edges


def test_load_rejects_bad_input():
    with pytest.raises(DisconnectedGraphError):
        load_graph("n=4\n1 2 1\n3 4 1\n")
    with pytest.raises(InvalidWeightError):
        load_graph("n=2\n1 2 0\n")
    with pytest.raises(GraphParseError):
        load_graph("1 2 1\n")
    with pytest.raises(GraphParseError):
        load_graph("n=2\n1 2\n")
    with pytest.raises(GraphError):
        load_graph("n=2\n1 1 1\n")
    with pytest.raises(GraphError):
        load_graph("n=2\n1 2 1\n2 1 1\n")


def test_comments_and_orientation():
    g = load_graph("# test\nn=3\n2 1 1.5  # reversed\n\n3 2 0.5\n")
    assert g.edges == ((1, 2, 1.5), (2, 3, 0.5))
    assert g.edge_index(3, 2) == 1
    with pytest.raises(KeyError):
        g.edge_index(1, 3)


def test_ring_probs_read_only():
    g = make_line(3)
    with pytest.raises(ValueError):
        g.ring_probs[0] = 1.0


def test_graph_from_spec(tmp_path):
    assert graph_from_spec("cycle", 4).m_edges == 4
    p = tmp_path / "g.txt"
    p.write_text(save_graph(make_line(3)))
    assert graph_from_spec(f"file:{p}").edges == make_line(3).edges
    with pytest.raises(GraphError):
        graph_from_spec("star", 3)


@st.composite
def weighted_trees(draw):
    n = draw(st.integers(2, 8))
    edges = []
    for v in range(2, n + 1):
        parent = draw(st.integers(1, v - 1))
        edges.append((parent, v, draw(st.floats(0.01, 100))))
    return WeightedGraph(n, tuple(edges))


@given(weighted_trees())
@settings(max_examples=50, deadline=None)
def test_save_load_roundtrip(g):
    h = load_graph(save_graph(g))
    assert h.n == g.n and h.edges == g.edges
    assert abs(h.ring_probs.sum() - 1) < 1e-12
