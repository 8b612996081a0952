from collections import deque

import networkx as nx
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.graph import (
    UNREACHABLE,
    DisconnectedGraphError,
    Graph,
    GraphFormatError,
    all_pairs_distances,
    connected_components,
    delete_saturated_edges,
    diameter_and_antipodal_pairs,
    geodesic_interval,
    normalize_edge,
    parse_graph,
    random_connected_graph,
    relabel,
)

from .strategies import connected_graphs, simple_graphs


@pytest.fixture
def path3():
    return Graph.from_edges(3, [(0, 1), (1, 2)])


@pytest.fixture
def c4():
    return Graph.from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def test_parse_edge_list(path3):
    assert parse_graph("0 1\n1 2") == path3


def test_parse_edge_list_comments_and_blank_lines(path3):
    assert parse_graph("# a path\n\n0 1   # first\n1 2\n") == path3


def test_parse_dimacs_shifts_to_zero_based(path3):
    assert parse_graph("c path\np edge 3 2\ne 1 2\ne 2 3", "dimacs") == path3


def test_parse_dimacs_keeps_declared_isolated_vertices():
    graph = parse_graph("p edge 4 1\ne 1 2", "dimacs")
    assert graph.n == 4
    assert not graph.is_connected()


def test_parse_json(path3):
    assert parse_graph('{"n": 3, "edges": [[0, 1], [1, 2]]}', "json") == path3


def test_parse_json_labels():
    graph = parse_graph('{"n": 2, "edges": [[0, 1]], "labels": ["a", "b"]}', "json")
    assert graph.label(1) == "b"


@pytest.mark.parametrize("text, fmt, line", [
    ("0 1\n0 1", "edge-list", 2),
    ("0 1\n1 0", "edge-list", 2),
    ("0 0", "edge-list", 1),
    ("0 1 2", "edge-list", 1),
    ("0 x", "edge-list", 1),
    ("p edge 2 1\ne 1 3", "dimacs", 2),
    ("e 1 2", "dimacs", 1),
    ("p edge 2 1\nq 1 2", "dimacs", 2),
])
def test_parse_errors_carry_line_numbers(text, fmt, line):
    with pytest.raises(GraphFormatError) as excinfo:
        parse_graph(text, fmt)
    assert excinfo.value.line == line
    assert str(excinfo.value).startswith(f"line {line}:")


@pytest.mark.parametrize("text, fmt", [
    ("", "edge-list"),
    ("# only a comment\n\n", "edge-list"),
    ("p edge 0 0\n", "dimacs"),
    ('{"n": 0, "edges": []}', "json"),
])
def test_parse_rejects_empty_graph(text, fmt):
    with pytest.raises(GraphFormatError):
        parse_graph(text, fmt)


def test_parse_json_rejects_out_of_range_edge():
    with pytest.raises(GraphFormatError):
        parse_graph('{"n": 2, "edges": [[0, 2]]}', "json")


def test_parse_unknown_format():
    with pytest.raises(ValueError):
        parse_graph("0 1", "graphml")


def test_graph_rejects_self_loop():
    with pytest.raises(ValueError):
        Graph.from_edges(2, [(1, 1)])


def test_from_networkx_keeps_labels():
    graph = Graph.from_networkx(nx.Graph([("a", "b"), ("b", "c")]))
    assert graph.n == 3
    assert graph.labels == ("a", "b", "c")
    assert graph.sorted_edges() == [(0, 1), (1, 2)]


def test_from_networkx_integer_nodes_have_no_labels():
    assert Graph.from_networkx(nx.path_graph(4)).labels is None


def test_all_pairs_distances(path3):
    d = all_pairs_distances(path3)
    assert d[0, 2] == 2
    assert d[2, 0] == 2
    assert [d[v, v] for v in range(3)] == [0, 0, 0]


def test_distances_across_components():
    graph = Graph.from_edges(4, [(0, 1), (2, 3)])
    d = all_pairs_distances(graph)
    assert d[0, 2] is UNREACHABLE
    assert d[2, 0] is UNREACHABLE
    assert not d.reachable(1, 3)
    with pytest.raises(DisconnectedGraphError):
        d.distance(0, 3)


def test_connected_components():
    graph = Graph.from_edges(5, [(3, 4), (0, 2)])
    assert connected_components(graph) == [(0, 2), (1,), (3, 4)]


def test_diameter_and_antipodal_pairs(c4):
    assert diameter_and_antipodal_pairs(c4, all_pairs_distances(c4)) == (2, ((0, 2), (1, 3)))


def test_diameter_rejects_disconnected():
    graph = Graph.from_edges(3, [(0, 1)])
    with pytest.raises(DisconnectedGraphError):
        diameter_and_antipodal_pairs(graph, all_pairs_distances(graph))


def test_geodesic_interval(c4, path3):
    assert geodesic_interval(all_pairs_distances(c4), 0, 2) == {0, 1, 2, 3}
    assert geodesic_interval(all_pairs_distances(c4), 0, 1) == {0, 1}
    assert geodesic_interval(all_pairs_distances(path3), 0, 2) == {0, 1, 2}


def test_delete_saturated_edges_drops_isolated_vertices():
    graph = Graph.from_edges(4, [(0, 1), (1, 2), (2, 3)])
    reduced, removed = delete_saturated_edges(graph, {0, 1, 2})
    assert reduced.sorted_edges() == [(2, 3)]
    assert removed == {0, 1}
    assert reduced.vertices == {2, 3}


def test_delete_saturated_edges_without_saturation_is_identity(path3):
    reduced, removed = delete_saturated_edges(path3, {0})
    assert reduced is path3
    assert removed == frozenset()


def test_random_connected_graph_is_seeded():
    first = random_connected_graph(10, 0.2, seed=3)
    assert first.is_connected()
    assert first == random_connected_graph(10, 0.2, seed=3)


def test_relabel(path3):
    moved = relabel(path3, [2, 0, 1])
    assert moved.sorted_edges() == [(0, 1), (0, 2)]
    with pytest.raises(ValueError):
        relabel(path3, [0, 0, 1])


def matrix_power_distances(graph):
    """d(u, v) is the least k with a nonzero (u, v) entry in (I + A)^k."""
    n = graph.n
    step = [[1 if u == v or normalize_edge(u, v) in graph.edges else 0 for v in range(n)] for u in range(n)]
    reach = [row[:] for row in step]
    distances = [[0 if u == v else None for v in range(n)] for u in range(n)]
    for k in range(1, n):
        for u in range(n):
            for v in range(n):
                if reach[u][v] and distances[u][v] is None:
                    distances[u][v] = k
        reach = [[int(any(reach[u][w] and step[w][v] for w in range(n))) for v in range(n)] for u in range(n)]
    return distances


def bfs_eccentricity(graph, source):
    seen = {source: 0}
    queue = deque([source])
    while queue:
        u = queue.popleft()
        for w in graph.adjacency[u]:
            if w not in seen:
                seen[w] = seen[u] + 1
                queue.append(w)
    return max(seen.values())


@settings(max_examples=80, deadline=None)
@given(simple_graphs(max_vertices=8))
def test_distances_match_matrix_powering(graph):
    d = all_pairs_distances(graph)
    expected = matrix_power_distances(graph)
    for u in range(graph.n):
        for v in range(graph.n):
            if expected[u][v] is None:
                assert d[u, v] is UNREACHABLE
            else:
                assert d[u, v] == d[v, u] == expected[u][v]


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_vertices=9))
def test_distances_satisfy_triangle_inequality(graph):
    d = all_pairs_distances(graph)
    for u in range(graph.n):
        for v in range(graph.n):
            for w in range(graph.n):
                assert d[u, v] <= d[u, w] + d[w, v]


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_vertices=9))
def test_diameter_is_largest_eccentricity(graph):
    diameter, pairs = diameter_and_antipodal_pairs(graph, all_pairs_distances(graph))
    assert diameter == max(bfs_eccentricity(graph, v) for v in range(graph.n))
    assert pairs


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_vertices=9))
def test_geodesic_interval_of_a_vertex_with_itself(graph):
    d = all_pairs_distances(graph)
    for u in range(graph.n):
        assert geodesic_interval(d, u, u) == {u}


@settings(max_examples=80, deadline=None)
@given(st.data())
def test_delete_saturated_edges_shrinks_and_leaves_no_isolated_vertex(data):
    graph = data.draw(simple_graphs(max_vertices=8))
    saturated = data.draw(st.sets(st.integers(0, graph.n - 1)))
    reduced, removed = delete_saturated_edges(graph, saturated)
    assert reduced.m <= graph.m
    assert reduced.edges <= graph.edges
    assert not any(u in saturated and v in saturated for u, v in reduced.edges)
    assert all(reduced.degree(v) > 0 for v in reduced.vertices)
    assert removed.isdisjoint(reduced.vertices)


@settings(max_examples=50, deadline=None)
@given(connected_graphs(max_vertices=9))
def test_geodesic_interval_matches_shortest_paths(graph):
    d = all_pairs_distances(graph)
    u, v = 0, graph.n - 1
    on_paths = {w for path in nx.all_shortest_paths(graph.nx_graph, u, v) for w in path}
    assert geodesic_interval(d, u, v) == on_paths


if __name__ == '__main__':
    pytest.main()
