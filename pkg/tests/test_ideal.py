import math
from fractions import Fraction

import pytest

from hypercomb.bicombing import BicombingEngine
from hypercomb.chains import OneChain
from hypercomb.errors import PreconditionError
from hypercomb.generators import free_product_cyclic_ball
from hypercomb.graph import boundary, path_chain
from hypercomb.ideal import (
    check_ideal_conditions,
    cone_neighbourhood,
    cross_ratio_delta_prime,
    divergence_product,
    nonzero_edge_search,
    q_ideal,
    ray_to,
    sample_diverging_ray_pairs,
)

from . import oracles


def rim_ray(ball, word):
    return ray_to(ball, ball.graph.vertex_index(word))


@pytest.fixture(scope="module")
def line_engine():
    return BicombingEngine(free_product_cyclic_ball([2, 2], 12))


def test_ray_is_geodesic_to_rim(f2_engine):
    ball = f2_engine.ball
    xi = rim_ray(ball, "ababab")
    assert xi.rim == ball.graph.vertex_index("ababab")
    assert len(xi.ray) == ball.radius + 1
    for u, v in zip(xi.ray, xi.ray[1:]):
        assert ball.graph.distance(u, v) == 1


def test_sampled_pairs_diverge_and_are_deterministic(f2_engine):
    ball = f2_engine.ball
    pairs = sample_diverging_ray_pairs(ball, 10, seed=3)
    again = sample_diverging_ray_pairs(ball, 10, seed=3)
    assert [(x.rim, y.rim) for x, y in pairs] == \
        [(x.rim, y.rim) for x, y in again]
    for xi, eta in pairs:
        assert divergence_product(ball, xi, eta) < Fraction(ball.trust_radius, 2)


def test_q_ideal_on_line_is_the_full_segment(line_engine):
    ball = line_engine.ball
    g = ball.graph
    dist = ball.base_distances()
    rims = [int(v) for v in ball.rim_vertices()]
    assert len(rims) == 2
    xi, eta = ray_to(ball, rims[0]), ray_to(ball, rims[1])
    report = q_ideal(line_engine, xi, eta)
    assert report.depth_used == ball.radius
    adj = oracles.adjacency(g)
    segment = oracles.tree_geodesic(adj, rims[0], rims[1])
    assert report.chain == path_chain(g, segment)
    assert report.stabilized
    assert report.stable_depth is not None
    # per-depth probe differences vanish once the probes are passed
    tail = report.probe_max_diffs[4:]
    assert all(d == 0 for d in tail)


def test_q_ideal_same_rim_is_degenerate_zero(f2_engine):
    xi = rim_ray(f2_engine.ball, "aaaaaa")
    report = q_ideal(f2_engine, xi, xi)
    assert report.degenerate
    assert report.chain == OneChain()


def test_ray_equivalence_threshold(f2_engine):
    from hypercomb.ideal import represents_same_point

    ball = f2_engine.ball  # radius 6, trust 2
    xi = rim_ray(ball, "aaaaaa")
    assert represents_same_point(ball, xi, xi, delta=1)
    # product 5 > trust - 4*delta: same point at this scale
    near = rim_ray(ball, "aaaaab")
    assert represents_same_point(ball, xi, near, delta=1)
    far = rim_ray(ball, "bbbbbb")
    assert not represents_same_point(ball, xi, far, delta=1)


def test_q_ideal_rejects_close_rays(f2_engine):
    ball = f2_engine.ball
    xi = rim_ray(ball, "aaaaaa")
    eta = rim_ray(ball, "aaaaab")  # shares a length-5 prefix
    with pytest.raises(PreconditionError):
        q_ideal(f2_engine, xi, eta)


def test_q_ideal_probe_stabilizes_on_f2(f2_engine):
    pairs = sample_diverging_ray_pairs(f2_engine.ball, 5, seed=9)
    for xi, eta in pairs:
        report = q_ideal(f2_engine, xi, eta)
        assert report.stabilized
        assert boundary(f2_engine.graph, report.chain).support() == \
            {xi.at(report.depth_used), eta.at(report.depth_used)}


def test_cones_are_disjoint_for_diverging_rays(f2_engine):
    ball = f2_engine.ball
    xi = rim_ray(ball, "aaaaaa")
    eta = rim_ray(ball, "bbbbbb")
    vp = cone_neighbourhood(ball, eta)
    vm = cone_neighbourhood(ball, xi)
    assert not (vp.edge_reps & vm.edge_reps)
    assert eta.rim in vp.vertices and xi.rim in vm.vertices


def test_ideal_conditions_on_line(line_engine):
    ball = line_engine.ball
    rims = [int(v) for v in ball.rim_vertices()]
    xi, eta = ray_to(ball, rims[0]), ray_to(ball, rims[1])
    report = check_ideal_conditions(line_engine, xi, eta)
    assert report.interior_cycle_ok
    assert report.plus_sum == -1 and report.plus_sum_ok
    assert report.minus_sum == 1 and report.minus_sum_ok
    assert report.cut_support_plus_ok and report.cut_support_minus_ok


def test_ideal_conditions_on_f2_samples(f2_engine):
    pairs = sample_diverging_ray_pairs(f2_engine.ball, 6, seed=21)
    for xi, eta in pairs:
        report = check_ideal_conditions(f2_engine, xi, eta)
        assert report.ok, (xi.rim, eta.rim)


def test_ideal_conditions_reject_overlapping_cones(f2_engine):
    ball = f2_engine.ball
    xi = rim_ray(ball, "aaaaaa")
    eta = rim_ray(ball, "bbbbbb")
    wide = cone_neighbourhood(ball, eta, threshold=Fraction(-1))
    with pytest.raises(PreconditionError):
        check_ideal_conditions(f2_engine, xi, eta, v_plus=wide)


def test_nonzero_edge_on_tree_geodesic(f2_engine):
    ball = f2_engine.ball
    g = ball.graph
    xi = rim_ray(ball, "aaaaaa")
    eta = rim_ray(ball, "bbbbbb")
    x = g.vertex_index("1")
    report = nonzero_edge_search(f2_engine, xi, eta, x)
    assert report.found
    assert report.distance == 0  # the geodesic edge at x itself
    assert report.value != 0
    assert report.search_radius == 27 + 2 + 3  # C + 2 + 3*delta at delta=1


def test_nonzero_edge_along_sampled_geodesic_points(f2_engine):
    ball = f2_engine.ball
    g = ball.graph
    xi = rim_ray(ball, "aaaaaa")
    eta = rim_ray(ball, "BABABA")
    gamma = g.fixed_geodesic(xi.rim, eta.rim)
    for x in gamma[::3]:
        report = nonzero_edge_search(f2_engine, xi, eta, x)
        assert report.found and report.value != 0


def test_cross_ratio_shared_point_is_zero(f2_engine):
    ball = f2_engine.ball
    xi = rim_ray(ball, "aaaaaa")
    eta = rim_ray(ball, "bbbbbb")
    zeta = rim_ray(ball, "BBBBBB")
    assert cross_ratio_delta_prime(ball, (xi, eta), (xi, zeta), 0.5) == 0.0


def test_cross_ratio_rejects_degenerate_pair(f2_engine):
    ball = f2_engine.ball
    xi = rim_ray(ball, "aaaaaa")
    eta = rim_ray(ball, "bbbbbb")
    with pytest.raises(PreconditionError):
        cross_ratio_delta_prime(ball, (xi, xi), (eta, eta), 0.5)


def test_cross_ratio_four_ray_value_and_swap_symmetry(f2_engine):
    ball = f2_engine.ball
    xi1 = rim_ray(ball, "aaaaaa")
    xi2 = rim_ray(ball, "bbbbbb")
    eta1 = rim_ray(ball, "abbbbb")
    eta2 = rim_ray(ball, "baaaaa")
    # products by hand: 1, 1 on the matched legs, 0 across
    value = cross_ratio_delta_prime(ball, (xi1, xi2), (eta1, eta2), 0.5)
    assert value == pytest.approx(1.0 / (2 * math.log(2)))
    swapped = cross_ratio_delta_prime(ball, (xi2, xi1), (eta1, eta2), 0.5)
    assert swapped == value
    swapped2 = cross_ratio_delta_prime(ball, (xi1, xi2), (eta2, eta1), 0.5)
    assert swapped2 == value


def test_cross_ratio_unit_cross_ratio_is_inf(f2_engine):
    ball = f2_engine.ball
    xi1 = rim_ray(ball, "aaaaaa")
    xi2 = rim_ray(ball, "AAAAAA")
    eta1 = rim_ray(ball, "bbbbbb")
    eta2 = rim_ray(ball, "BBBBBB")
    assert cross_ratio_delta_prime(ball, (xi1, xi2), (eta1, eta2), 0.5) == math.inf


def test_cross_ratio_is_isometry_invariant(f2_engine):
    ball = f2_engine.ball
    g = ball.graph
    # left multiplication by a shortens A-leading words, so the images of
    # these points (and of the basepoint) stay inside the ball
    action = next(a for a in ball.actions if a.name == "left*a")
    words = ["Abbbb", "ABBBB", "ABABA", "Abaab"]
    points = [g.vertex_index(w) for w in words]
    images = [action.apply_vertex(p) for p in points]
    assert None not in images
    x0 = ball.basepoint
    gx0 = action.apply_vertex(x0)

    class _P:  # endpoint stand-ins: only the rim vertex enters the formula
        def __init__(self, rim):
            self.rim = rim

    base = cross_ratio_delta_prime(
        ball, (_P(points[0]), _P(points[1])), (_P(points[2]), _P(points[3])),
        0.5, x0=x0)
    moved = cross_ratio_delta_prime(
        ball, (_P(images[0]), _P(images[1])), (_P(images[2]), _P(images[3])),
        0.5, x0=gx0)
    assert base == pytest.approx(1.0 / (2 * math.log(2)))
    assert moved == base
