import random
from fractions import Fraction

import pytest

from hypercomb.bicombing import BicombingEngine, ConstantsLedger, scan_inner_pairs
from hypercomb.chains import OneChain, ZeroChain
from hypercomb.errors import PreconditionError, TrustRadiusError
from hypercomb.graph import boundary, path_chain

from . import oracles
from .conftest import grid_graph


def test_constants_ledger_multiples():
    led = ConstantsLedger.from_delta(3)
    assert (led.fbar_cut, led.fbar_support_radius, led.pprime_tail,
            led.quasigeodesic_C, led.coefficient_bound) == (30, 24, 54, 81, 18027)
    with pytest.raises(PreconditionError):
        ConstantsLedger.from_delta(0)


# -- averaged geodesic chains ---------------------------------------------------


def test_p_avg_on_tree_is_the_unique_geodesic_chain(f2_engine):
    g = f2_engine.graph
    a, b = g.vertex_index("ab"), g.vertex_index("ba")
    chain = f2_engine.p_avg(a, b)
    expected = path_chain(g, oracles.tree_geodesic(oracles.adjacency(g), a, b))
    assert chain == expected


def test_p_avg_square_antipodal_halves(square_engine):
    g = square_engine.graph
    a, b = g.vertex_index("v0"), g.vertex_index("v2")
    chain = square_engine.p_avg(a, b)
    geos = g.all_geodesics(a, b)
    expected = OneChain()
    for path in geos.paths:
        expected = expected + path_chain(g, path).scaled(Fraction(1, 2))
    assert chain == expected
    assert chain.l1() == 2
    assert boundary(g, chain) == ZeroChain({b: 1, a: -1})


def test_p_avg_equals_enumerated_average_on_grid():
    g = grid_graph(3, 3)
    from hypercomb.generators import TruncatedBall

    ball = TruncatedBall(g, 0, 4, 4)
    engine = BicombingEngine(ball, delta=2)
    for a, b in [(0, 8), (2, 6), (0, 5), (3, 3)]:
        chain = engine.p_avg(a, b)
        geos = g.all_geodesics(a, b)
        expected = OneChain()
        weight = Fraction(1, len(geos))
        for path in geos.paths:
            expected = expected + path_chain(g, path).scaled(weight)
        assert chain == expected
        assert chain.l1() <= g.distance(a, b)
        # no edge appears in any geodesic more than once
        assert chain.linf() <= 1


def test_p_avg_degenerate_pair(f2_engine):
    a = f2_engine.ball.basepoint
    assert f2_engine.p_avg(a, a) == OneChain()


def test_p_avg_point_endpoints(square_engine):
    g = square_engine.graph
    a, b = g.vertex_index("v0"), g.vertex_index("v2")
    assert square_engine.p_avg_point(a, b, 0) == ZeroChain.point(a)
    assert square_engine.p_avg_point(a, b, 2) == ZeroChain.point(b)
    mid = square_engine.p_avg_point(a, b, 1)
    assert mid == ZeroChain({g.vertex_index("v1"): Fraction(1, 2),
                             g.vertex_index("v3"): Fraction(1, 2)})
    with pytest.raises(PreconditionError):
        square_engine.p_avg_point(a, b, 3)


# -- waypoint distribution -------------------------------------------------------


def test_fbar_is_point_mass_within_cut(f2_engine):
    g = f2_engine.graph
    a, b = g.vertex_index("1"), g.vertex_index("abab")  # distance 4 <= 10
    assert f2_engine.fbar(b, a, check_trust=False) == ZeroChain.point(a)


def test_fbar_at_exact_cut_distance(f2_engine):
    g = f2_engine.graph
    a = g.vertex_index("ababa")  # |a| = 5
    b = g.vertex_index("BABAB")  # distance 10 from a
    assert g.distance(a, b) == 10 == f2_engine.ledger.fbar_cut
    assert f2_engine.fbar(b, a, check_trust=False) == ZeroChain.point(a)


def test_fbar_beyond_cut_is_waypoint_on_geodesic(f2_engine):
    g = f2_engine.graph
    adj = oracles.adjacency(g)
    a = g.vertex_index("abABab")   # |.| = 6
    b = g.vertex_index("BAbaBA")   # |.| = 6
    d = g.distance(a, b)
    assert d == 12
    chain = f2_engine.fbar(b, a, check_trust=False)
    path = oracles.tree_geodesic(adj, b, a)
    assert chain == ZeroChain.point(path[10])
    assert chain.is_convex_combination()


def test_fbar_support_strictly_decreases_distance(c33_engine):
    g = c33_engine.graph
    rng = random.Random(5)
    verts = list(range(g.n_vertices))
    dist_cache = {}
    for _ in range(40):
        a, b = rng.choice(verts), rng.choice(verts)
        if a == b:
            continue
        chain = c33_engine.fbar(b, a, check_trust=False)
        assert chain.is_convex_combination()
        da = dist_cache.setdefault(a, g.distances_from(a))
        d = int(da[b])
        for x in chain.support():
            assert int(da[x]) <= d - 1 or (d <= c33_engine.ledger.fbar_cut and x == a)


def test_fbar_equivariance(f2_engine):
    g = f2_engine.graph
    a, b = g.vertex_index("a"), g.vertex_index("B")
    chain = f2_engine.fbar(b, a, check_trust=False)
    for action in f2_engine.ball.actions[:2]:
        ga, gb = action.apply_vertex(a), action.apply_vertex(b)
        if ga is None or gb is None:
            continue
        moved = action.apply_zero_chain(chain)
        if moved is None:
            continue
        assert moved == f2_engine.fbar(gb, ga, check_trust=False)


# -- the combing recursion --------------------------------------------------------


def test_qprime_of_equal_endpoints_is_zero(f2_engine):
    a = f2_engine.ball.basepoint
    assert f2_engine.qprime(a, a) == OneChain()


def test_qprime_identity_everywhere_on_small_tree():
    from hypercomb.generators import free_group_ball

    ball = free_group_ball(2, 4)
    engine = BicombingEngine(ball)
    g = ball.graph
    for a in range(g.n_vertices):
        for b in range(0, g.n_vertices, 7):
            chain = engine.qprime(a, b, check_trust=False)
            expected = ZeroChain() if a == b else ZeroChain({b: 1, a: -1})
            assert boundary(g, chain) == expected


def test_qprime_on_tree_equals_geodesic_chain(f2_engine):
    g = f2_engine.graph
    adj = oracles.adjacency(g)
    rng = random.Random(2)
    verts = list(range(g.n_vertices))
    for _ in range(30):
        a, b = rng.choice(verts), rng.choice(verts)
        chain = f2_engine.qprime(a, b, check_trust=False)
        expected = oracles.path_chain_coeffs(g, oracles.tree_geodesic(adj, a, b)) \
            if a != b else {}
        assert chain.coeffs == expected


def test_qprime_identity_with_fractional_weights(square_engine):
    g = square_engine.graph
    a, b = g.vertex_index("v0"), g.vertex_index("v2")
    chain = square_engine.qprime(a, b)
    assert boundary(g, chain) == ZeroChain({b: 1, a: -1})
    assert chain.linf() == Fraction(1, 2)


def test_qprime_identity_on_multigeodesic_grid():
    from hypercomb.generators import TruncatedBall

    g = grid_graph(4, 4)
    ball = TruncatedBall(g, 0, 6, 6)
    engine = BicombingEngine(ball, delta=2)
    for a in range(0, 16, 3):
        for b in range(16):
            chain = engine.qprime(a, b)
            expected = ZeroChain() if a == b else ZeroChain({b: 1, a: -1})
            assert boundary(g, chain) == expected


def test_qprime_equivariance(c33_engine):
    g = c33_engine.graph
    a, b = g.vertex_index("s1"), g.vertex_index("t2s2")
    chain = c33_engine.qprime(a, b, check_trust=False)
    moved_any = False
    for action in c33_engine.ball.actions:
        ga, gb = action.apply_vertex(a), action.apply_vertex(b)
        if ga is None or gb is None:
            continue
        moved = action.apply_one_chain(g, chain)
        if moved is None:
            continue
        assert moved == c33_engine.qprime(ga, gb, check_trust=False)
        moved_any = True
    assert moved_any


def test_trust_radius_enforced(f2_engine):
    g = f2_engine.graph
    rim = g.vertex_index("ababab")
    with pytest.raises(TrustRadiusError):
        f2_engine.qprime(f2_engine.ball.basepoint, rim)
    # explicit override allows rim computations
    chain = f2_engine.qprime(f2_engine.ball.basepoint, rim, check_trust=False)
    assert chain.l1() == 6


# -- antisymmetrization, area, bounds ----------------------------------------------


def test_q_antisymmetry(f2_engine, c33_engine):
    for engine, pair in ((f2_engine, ("ab", "BA")), (c33_engine, ("s1", "t1s1"))):
        g = engine.graph
        a, b = g.vertex_index(pair[0]), g.vertex_index(pair[1])
        assert engine.q(a, b, check_trust=False) == -engine.q(b, a, check_trust=False)
        assert engine.q(a, a, check_trust=False) == OneChain()


def test_q_on_tree_equals_geodesic_chain(f2_engine):
    g = f2_engine.graph
    adj = oracles.adjacency(g)
    a, b = g.vertex_index("aB"), g.vertex_index("ba")
    expected = oracles.path_chain_coeffs(g, oracles.tree_geodesic(adj, a, b))
    assert f2_engine.q(a, b, check_trust=False).coeffs == expected


def test_area_vanishes_on_trees(f2_engine):
    g = f2_engine.graph
    rng = random.Random(9)
    verts = list(range(g.n_vertices))
    for _ in range(25):
        a, b, c = (rng.choice(verts) for _ in range(3))
        assert f2_engine.area(a, b, c, check_trust=False) == 0


def test_area_degenerate_triple_is_zero(c33_engine):
    g = c33_engine.graph
    a, b = g.vertex_index("s1"), g.vertex_index("t2")
    assert c33_engine.area(a, a, b, check_trust=False) == 0


def test_area_three_around_a_triangle(c33_engine):
    g = c33_engine.graph
    a = g.vertex_index("s1t1")
    b = g.vertex_index("s2t1")
    c = g.vertex_index("t1")
    assert c33_engine.area(a, b, c, check_trust=False) == 3


def test_cyclic_sum_invariance(c33_engine):
    g = c33_engine.graph
    a = g.vertex_index("s1t1")
    b = g.vertex_index("s2")
    c = g.vertex_index("t2s1")
    base = c33_engine.cyclic_sum(a, b, c, check_trust=False)
    assert c33_engine.cyclic_sum(b, c, a, check_trust=False) == base
    assert c33_engine.cyclic_sum(c, a, b, check_trust=False) == base
    # odd orderings negate the sum chain
    assert c33_engine.cyclic_sum(b, a, c, check_trust=False) == -base


def test_verify_bounds_tree_pairs(f2_engine):
    g = f2_engine.graph
    report = f2_engine.verify_bounds(g.vertex_index("a"), g.vertex_index("bA"),
                                     check_trust=False)
    assert report.ok
    for row in report.rows:
        assert row.l1 == row.distance  # trees: the chain is the geodesic
        assert row.coeff_max == 1
        assert row.support_distance == 0


def test_verify_bounds_square(square_engine):
    g = square_engine.graph
    report = square_engine.verify_bounds(g.vertex_index("v0"), g.vertex_index("v2"))
    assert report.ok
    assert all(row.geodesics_checked == 2 for row in report.rows)


# -- exhaustive scan ----------------------------------------------------------------


def test_scan_inner_pairs_on_tree(f2_engine):
    report = scan_inner_pairs(f2_engine)
    inner = len(f2_engine.ball.inner_vertices())
    assert report.n_pairs == inner * inner
    assert report.ok
    assert report.is_tree
    assert report.max_coeff == 1
    assert report.min_nonzero_coeff == 1
    assert report.max_support_distance == 0


def test_scan_with_extended_sample(c33_engine):
    report = scan_inner_pairs(c33_engine, extended_sources=5, extended_targets=8,
                              seed=17)
    assert report.ok
    assert report.n_extended_pairs == 40
    assert report.max_coeff <= c33_engine.ledger.coefficient_bound
