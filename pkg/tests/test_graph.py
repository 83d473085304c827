import numpy as np
import pytest

from netbone.graph import (
    EdgeListParseError,
    Graph,
    induced_subgraph,
    is_connected,
    largest_component,
    parse_edge_list,
)

from conftest import build


def test_parse_minimal_path():
    g = parse_edge_list("a b\nb c\n")
    assert g.vertex_count == 3
    assert g.num_edges == 2
    assert g.num_arcs == 4
    assert g.labels == ["a", "b", "c"]


def test_parse_collapses_reversed_duplicate():
    g = parse_edge_list("a b\nb a\n")
    assert g.vertex_count == 2
    assert g.num_edges == 1


def test_parse_comments_and_blanks():
    g = parse_edge_list("# header\n\na b\n  \nb c\n")
    assert g.num_edges == 2


def test_parse_bytes_input():
    g = parse_edge_list(b"a b\n")
    assert g.num_edges == 1


def test_parse_malformed_line_reports_number():
    with pytest.raises(EdgeListParseError, match="line 2"):
        parse_edge_list("a b\na b c\n")


def test_parse_self_loop_names_label():
    with pytest.raises(EdgeListParseError, match="x"):
        parse_edge_list("x x\n")


def test_largest_component_tie_prefers_first_vertex():
    # two disjoint triangles of equal size
    g = build("abcdef", [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)])
    lc = largest_component(g)
    assert sorted(lc.labels) == ["a", "b", "c"]


def test_largest_component_identity_on_connected(p4):
    lc = largest_component(p4)
    assert lc.labels == p4.labels
    assert np.array_equal(lc.edges, p4.edges)


def test_largest_component_empty_graph():
    g = parse_edge_list("")
    assert largest_component(g).vertex_count == 0


def test_induced_subgraph_p4_middle(p4):
    sub = induced_subgraph(p4, {1, 2})
    assert sub.vertex_count == 2
    assert sub.num_edges == 1


def test_induced_subgraph_empty_set(p4):
    sub = induced_subgraph(p4, set())
    assert sub.vertex_count == 0
    assert sub.num_edges == 0


def test_induced_subgraph_identity(triangle):
    sub = induced_subgraph(triangle, {0, 1, 2})
    assert sub.num_edges == 3


def test_induced_subgraph_unknown_vertex(p4):
    with pytest.raises(ValueError):
        induced_subgraph(p4, {0, 9})


def test_is_connected_cases(p4):
    assert is_connected(p4, {0, 1, 2, 3})
    assert not is_connected(p4, {0, 3})
    assert is_connected(p4, {1, 2})
    with pytest.raises(ValueError):
        is_connected(p4, set())


def test_export_round_trip():
    g = parse_edge_list("a b\nb c\nc a\nd c\n")
    g2 = parse_edge_list(g.export_edge_list())
    assert sorted(g2.labels) == sorted(g.labels)
    assert g2.num_edges == g.num_edges
    edges1 = {frozenset((g.labels[int(u)], g.labels[int(v)])) for u, v in g.edges}
    edges2 = {frozenset((g2.labels[int(u)], g2.labels[int(v)])) for u, v in g2.edges}
    assert edges1 == edges2


def test_rev_is_involution_without_fixed_points(p4, star, triangle):
    for g in (p4, star, triangle):
        for a in range(g.num_arcs):
            assert int(g.rev[int(g.rev[a])]) == a
            assert int(g.rev[a]) != a
        assert g.num_arcs == 2 * g.num_edges


def test_arc_heads_in_adjacency(triangle):
    for a in range(triangle.num_arcs):
        t = int(triangle.arc_tail[a])
        assert t < triangle.vertex_count
        assert int(triangle.nbrs[a]) in set(int(x) for x in triangle.neighbors(t))


def test_arc_id_and_edge_id(p4):
    a = p4.arc_id(1, 2)
    assert int(p4.arc_tail[a]) == 1
    assert int(p4.nbrs[a]) == 2
    assert p4.edge_id(1, 2) == p4.edge_id(2, 1)
    with pytest.raises(ValueError):
        p4.arc_id(0, 3)
