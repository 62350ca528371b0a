
import pytest
from hypothesis import given, settings, strategies as st

from hypercomb.errors import GeodesicCapError, GraphFormatError, GraphStructureError
from hypercomb.graph import Graph, format_graph_text, parse_graph_text

from . import oracles
from .conftest import cycle_graph, grid_graph, path_graph


def test_involution_must_be_fixpoint_free():
    with pytest.raises(GraphStructureError):
        Graph(["x", "y"], ["e", "f"], [0, 1], [1, 0], [0, 1])


def test_involution_must_swap_endpoints():
    with pytest.raises(GraphStructureError):
        Graph(["x", "y", "z"], ["e", "f"], [0, 1], [1, 2], [1, 0])


def test_disconnected_graph_rejected():
    with pytest.raises(GraphStructureError):
        Graph(["x", "y"], [], [], [], [])


def test_distances_basic():
    g = path_graph(3)
    d = g.distances_from(0)
    assert d[0] == 0 and d[1] == 1 and d[2] == 2
    assert all(int(g.distances_from(1)[v]) == 1 for v in (0, 2))


@settings(max_examples=60, deadline=None)
@given(data=st.data())
def test_distances_match_python_bfs(data):
    n = data.draw(st.integers(min_value=2, max_value=10))
    tree_edges = [(f"n{i}", f"n{data.draw(st.integers(0, i - 1))}")
                  for i in range(1, n)]
    extra = data.draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
        .filter(lambda p: p[0] != p[1]), max_size=4))
    edges = tree_edges + [(f"n{u}", f"n{v}") for u, v in extra]
    g = Graph.undirected([f"n{i}" for i in range(n)], edges)
    adj = oracles.adjacency(g)
    for v in range(n):
        expected = oracles.bfs_distances(adj, v)
        got = g.distances_from(v)
        assert {u: int(got[u]) for u in range(n)} == expected


def test_gromov_product_examples():
    g = path_graph(4)
    # (a, a, x0) -> d(a, x0)
    assert g.gromov_product(3, 3, 0) == 3
    # known half-integer-free case: 3, 4, 5 -> 1
    tri = Graph.undirected(
        ["a", "x", "m1", "m2", "b", "q1", "q2", "q3"],
        [("a", "m1"), ("m1", "m2"), ("m2", "x"),       # d(a,x0)=3
         ("x", "q1"), ("q1", "q2"), ("q2", "q3"), ("q3", "b"),  # d(b,x0)=4
         ])
    a, b, x0 = tri.vertex_index("a"), tri.vertex_index("b"), tri.vertex_index("x")
    assert tri.distance(a, x0) == 3 and tri.distance(b, x0) == 4
    assert tri.distance(a, b) == 7 != 5  # tree: product 0
    assert tri.gromov_product(a, b, x0) == 0
    # cycle gives the 3-4-5 example
    c = cycle_graph(12)
    assert c.distance(0, 3) == 3 and c.distance(0, 8) == 4 and c.distance(3, 8) == 5
    assert c.gromov_product(3, 8, 0) == 1


def test_gromov_product_symmetry_and_range():
    g = grid_graph(3, 4)
    for (a, b, x0) in [(0, 11, 5), (2, 9, 0), (7, 7, 3)]:
        p = g.gromov_product(a, b, x0)
        assert p == g.gromov_product(b, a, x0)
        assert 0 <= p <= min(g.distance(a, x0), g.distance(b, x0))


def test_gromov_product_on_tree_is_distance_to_geodesic():
    ball_edges = [("r", "a1"), ("a1", "a2"), ("r", "b1"), ("b1", "b2"),
                  ("r", "c1"), ("c1", "c2"), ("c2", "c3")]
    g = Graph.undirected(["r", "a1", "a2", "b1", "b2", "c1", "c2", "c3"],
                         ball_edges)
    adj = oracles.adjacency(g)
    for a in range(g.n_vertices):
        for b in range(g.n_vertices):
            path = oracles.tree_geodesic(adj, a, b)
            for x0 in range(g.n_vertices):
                dist0 = oracles.bfs_distances(adj, x0)
                assert g.gromov_product(a, b, x0) == min(dist0[v] for v in path)


def test_all_geodesics_on_tree_is_unique():
    g = path_graph(6)
    geos = g.all_geodesics(0, 5)
    assert len(geos) == 1
    assert geos.paths[0] == (0, 1, 2, 3, 4, 5)


def test_all_geodesics_square_antipodal():
    g = cycle_graph(4)
    geos = g.all_geodesics(0, 2)
    assert len(geos) == 2
    assert set(geos.paths) == {(0, 1, 2), (0, 3, 2)}


def test_all_geodesics_degenerate_pair():
    g = path_graph(3)
    geos = g.all_geodesics(1, 1)
    assert geos.paths == ((1,),)


def test_geodesic_cap():
    g = grid_graph(4, 4)
    with pytest.raises(GeodesicCapError):
        g.all_geodesics(0, 15, cap=3)


@settings(max_examples=40, deadline=None)
@given(data=st.data())
def test_geodesic_enumeration_matches_brute_force(data):
    n = data.draw(st.integers(min_value=2, max_value=9))
    tree_edges = [(i, data.draw(st.integers(0, i - 1))) for i in range(1, n)]
    extra = data.draw(st.lists(
        st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))
        .filter(lambda p: p[0] != p[1]), max_size=5))
    seen = set()
    edges = []
    for u, v in tree_edges + extra:
        key = (min(u, v), max(u, v))
        if key not in seen:
            seen.add(key)
            edges.append((f"n{u}", f"n{v}"))
    g = Graph.undirected([f"n{i}" for i in range(n)], edges)
    adj = oracles.adjacency(g)
    a = data.draw(st.integers(0, n - 1))
    b = data.draw(st.integers(0, n - 1))
    expected = oracles.shortest_paths_brute(adj, a, b)
    got = sorted(g.all_geodesics(a, b).paths)
    assert got == expected
    assert g.geodesic_count(a, b) == len(expected)


def test_fixed_geodesic_is_lexicographically_first():
    g = cycle_graph(4)
    assert g.fixed_geodesic(0, 2) == (0, 1, 2)
    assert g.fixed_geodesic(2, 0) == (2, 1, 0)


def test_graph_text_round_trip():
    g = cycle_graph(5)
    text = format_graph_text(g, base=0, radius=2, trust=2)
    g2, meta = parse_graph_text(text)
    assert meta["base_index"] == 0 and meta["radius"] == 2 and meta["trust"] == 2
    assert format_graph_text(g2, base=0, radius=2, trust=2) == text


def test_parse_errors_carry_line_numbers():
    with pytest.raises(GraphFormatError) as exc:
        parse_graph_text("v x\nnonsense line here\n")
    assert "line 2" in str(exc.value)
    with pytest.raises(GraphFormatError):
        parse_graph_text("v x\nv y\ne e1 x y e_missing\n")


def test_parse_rejects_bad_involution():
    bad = (
        "v x\nv y\nv z\n"
        "e e1 x y e2\n"
        "e e2 y z e1\n"  # endpoints do not swap
    )
    with pytest.raises(GraphFormatError):
        parse_graph_text(bad)
