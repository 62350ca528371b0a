"""Finite-scale boundary machinery: rays, cones, and the extended combing.

A boundary point of the infinite graph is stood in for by a geodesic ray
from the basepoint to the truncation rim.  The extension of the combing to
a pair of rays is probed by evaluating it at increasing depths and watching
a fixed probe edge set stabilize; cycle and flux conditions are then checked
with exact arithmetic on the deepest chain.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from fractions import Fraction

from scipy.sparse.csgraph import dijkstra

from .chains import OneChain, ZeroChain, coeff_str
from .errors import PreconditionError
from .graph import boundary

__all__ = [
    "PseudoBoundaryPoint",
    "GraphNeighbourhood",
    "ray_to",
    "sample_diverging_ray_pairs",
    "sample_diverging_ray_triples",
    "q_ideal",
    "cone_neighbourhood",
    "check_ideal_conditions",
    "nonzero_edge_search",
    "cross_ratio_delta_prime",
]


@dataclass(frozen=True)
class PseudoBoundaryPoint:
    """A geodesic ray from the basepoint to a rim vertex."""

    ray: tuple

    @property
    def rim(self):
        return self.ray[-1]

    @property
    def max_depth(self):
        return len(self.ray) - 1

    def at(self, n):
        return self.ray[min(n, self.max_depth)]


def ray_to(ball, rim_vertex):
    """Canonical ray: the lexicographically smallest geodesic to the rim."""
    dist = ball.base_distances()
    if int(dist[rim_vertex]) < ball.trust_radius:
        raise PreconditionError(
            "ray endpoint must be at least the trust radius away")
    return PseudoBoundaryPoint(ball.graph.fixed_geodesic(ball.basepoint,
                                                         rim_vertex))


def divergence_product(ball, xi, eta):
    return ball.graph.gromov_product(xi.rim, eta.rim, ball.basepoint)


def represents_same_point(ball, xi, eta, delta):
    """Finite-scale asymptotic equivalence of two rays.

    Rays stand for the same boundary point when their rim endpoints' product
    exceeds ``trust_radius - 4*delta`` (floored at zero: rays with no shared
    prefix are always distinct).  Only meaningful when the trusted region is
    much deeper than ``delta``.
    """
    if xi.rim == eta.rim:
        return True
    threshold = max(0, ball.trust_radius - 4 * delta)
    return divergence_product(ball, xi, eta) > threshold


def require_diverging(ball, xi, eta):
    threshold = Fraction(ball.trust_radius, 2)
    prod = divergence_product(ball, xi, eta)
    if prod >= threshold:
        raise PreconditionError(
            f"rays share too long a prefix (product {prod} >= {threshold})")


def sample_diverging_ray_pairs(ball, n, seed):
    """Seeded rim-vertex pairs whose rays diverge near the basepoint."""
    rng = random.Random(seed)
    rim = [int(v) for v in ball.rim_vertices()]
    threshold = Fraction(ball.trust_radius, 2)
    pairs = []
    attempts = 0
    while len(pairs) < n and attempts < 100 * n:
        attempts += 1
        p = rng.choice(rim)
        q = rng.choice(rim)
        if p == q:
            continue
        if ball.graph.gromov_product(p, q, ball.basepoint) >= threshold:
            continue
        pairs.append((ray_to(ball, p), ray_to(ball, q)))
    if len(pairs) < n:
        raise PreconditionError("could not sample enough diverging ray pairs")
    return pairs


def sample_diverging_ray_triples(ball, n, seed):
    """Seeded pairwise-distinct, pairwise-diverging ray triples."""
    rng = random.Random(seed)
    rim = [int(v) for v in ball.rim_vertices()]
    threshold = Fraction(ball.trust_radius, 2)
    graph = ball.graph
    triples = []
    attempts = 0
    while len(triples) < n and attempts < 200 * n:
        attempts += 1
        p, q, r = (rng.choice(rim) for _ in range(3))
        if len({p, q, r}) < 3:
            continue
        if any(graph.gromov_product(u, v, ball.basepoint) >= threshold
               for u, v in ((p, q), (q, r), (r, p))):
            continue
        triples.append((ray_to(ball, p), ray_to(ball, q), ray_to(ball, r)))
    if len(triples) < n:
        raise PreconditionError("could not sample enough diverging ray triples")
    return triples


@dataclass(frozen=True)
class IdealChainReport:
    xi_rim: int
    eta_rim: int
    depth_used: int
    chain: OneChain
    probe_edge_count: int
    probe_max_diffs: tuple
    stabilized: bool
    stable_depth: int | None
    degenerate: bool = False

    def to_jsonable(self, graph):
        return {
            "xi": graph.vertex_ids[self.xi_rim],
            "eta": graph.vertex_ids[self.eta_rim],
            "depth_used": self.depth_used,
            "probe_edge_count": self.probe_edge_count,
            "probe_max_diffs": [coeff_str(d) for d in self.probe_max_diffs],
            "stabilized": self.stabilized,
            "stable_depth": self.stable_depth,
            "degenerate": self.degenerate,
            "chain": self.chain.to_json_dict(graph),
        }


def probe_edges(ball, probe_radius):
    """Orientation classes within the probe radius of the basepoint."""
    graph = ball.graph
    dist = ball.base_distances()
    reps = []
    for e in graph.edge_reps():
        du = int(dist[graph.edge_src[e]])
        dv = int(dist[graph.edge_dst[e]])
        if min(du, dv) <= probe_radius:
            reps.append(e)
    return reps


def q_ideal(engine, xi, eta, depth=None, probe_radius=None, tolerance=0):
    """Combing chain between two rays, evaluated depth by depth.

    Returns the deepest chain together with the per-depth maximum change on
    the probe edges; stabilization means the change stayed within
    ``tolerance`` (exact zero by default; pass e.g. ``1e-9`` to judge
    float-exported values) for two successive depths.
    """
    ball = engine.ball
    if xi.rim == eta.rim:
        return IdealChainReport(
            xi_rim=xi.rim, eta_rim=eta.rim, depth_used=0, chain=OneChain(),
            probe_edge_count=0, probe_max_diffs=(), stabilized=True,
            stable_depth=0, degenerate=True)
    require_diverging(ball, xi, eta)
    if probe_radius is None:
        probe_radius = 3 * engine.ledger.delta
    probes = probe_edges(ball, probe_radius)
    max_depth = min(xi.max_depth, eta.max_depth)
    if depth is not None:
        max_depth = min(depth, max_depth)
    if max_depth < 1:
        raise PreconditionError("rays are too short for a depth sweep")
    diffs = []
    prev = None
    stable_depth = None
    chain = OneChain()
    for n in range(1, max_depth + 1):
        chain = engine.q(xi.at(n), eta.at(n), check_trust=False)
        if prev is not None:
            diff = chain - prev
            worst = max((abs(diff.coeffs.get(e, 0)) for e in probes),
                        default=0)
            diffs.append(worst)
            if (stable_depth is None and len(diffs) >= 2
                    and diffs[-1] <= tolerance and diffs[-2] <= tolerance):
                stable_depth = n
        prev = chain
    stabilized = (len(diffs) >= 2 and diffs[-1] <= tolerance
                  and diffs[-2] <= tolerance)
    return IdealChainReport(
        xi_rim=xi.rim, eta_rim=eta.rim, depth_used=max_depth, chain=chain,
        probe_edge_count=len(probes), probe_max_diffs=tuple(diffs),
        stabilized=stabilized, stable_depth=stable_depth)


@dataclass(frozen=True)
class GraphNeighbourhood:
    """Edge set of a Gromov-product cone around a ray's rim vertex."""

    rim: int
    threshold: Fraction
    vertices: frozenset
    edge_reps: frozenset


def cone_neighbourhood(ball, point, threshold=None):
    """Cone ``{x : (x . rim) > threshold}`` restricted to the truncation."""
    graph = ball.graph
    if threshold is None:
        threshold = Fraction(ball.trust_radius, 2)
    dist_base = ball.base_distances()
    dist_rim = graph.distances_from(point.rim)
    d_rim = int(dist_base[point.rim])
    verts = set()
    for v in range(graph.n_vertices):
        product = Fraction(int(dist_base[v]) + d_rim - int(dist_rim[v]), 2)
        if product > threshold:
            verts.add(v)
    reps = frozenset(
        e for e in graph.edge_reps()
        if int(graph.edge_src[e]) in verts and int(graph.edge_dst[e]) in verts)
    return GraphNeighbourhood(rim=point.rim, threshold=Fraction(threshold),
                              vertices=frozenset(verts), edge_reps=reps)


@dataclass(frozen=True)
class IdealConditionsReport:
    depth: int
    interior_cycle_ok: bool
    plus_sum: object
    minus_sum: object
    plus_sum_ok: bool
    minus_sum_ok: bool
    cut_support_plus_ok: bool
    cut_support_minus_ok: bool

    @property
    def ok(self):
        return (self.interior_cycle_ok and self.plus_sum_ok
                and self.minus_sum_ok)

    def to_jsonable(self):
        return {
            "depth": self.depth,
            "interior_cycle_ok": self.interior_cycle_ok,
            "plus_sum": coeff_str(self.plus_sum),
            "minus_sum": coeff_str(self.minus_sum),
            "plus_sum_ok": self.plus_sum_ok,
            "minus_sum_ok": self.minus_sum_ok,
            "cut_support_plus_ok": self.cut_support_plus_ok,
            "cut_support_minus_ok": self.cut_support_minus_ok,
            "ok": self.ok,
        }


def check_ideal_conditions(engine, xi, eta, v_plus=None, v_minus=None,
                           depth=None):
    """Cycle and flux checks for the extended combing at finite scale.

    ``v_plus`` is a cone neighbourhood of ``eta`` (the chain's forward end)
    and ``v_minus`` one of ``xi``.  Away from the current endpoints the
    chain is exactly a cycle; restricted to either cone, its boundary sums
    to minus one (plus side) or plus one (minus side) once the current
    endpoint is excluded.
    """
    ball, graph = engine.ball, engine.graph
    if xi.rim == eta.rim:
        raise PreconditionError("distinct rays required")
    require_diverging(ball, xi, eta)
    if v_plus is None:
        v_plus = cone_neighbourhood(ball, eta)
    if v_minus is None:
        v_minus = cone_neighbourhood(ball, xi)
    if v_plus.edge_reps & v_minus.edge_reps:
        raise PreconditionError("cone neighbourhoods are not disjoint")
    report = q_ideal(engine, xi, eta, depth=depth)
    n = report.depth_used
    a_n, b_n = xi.at(n), eta.at(n)
    if b_n not in v_plus.vertices or a_n not in v_minus.vertices:
        raise PreconditionError(
            "depth too shallow: current endpoints lie outside their cones")
    chain = report.chain
    full_boundary = boundary(graph, chain)
    interior_ok = full_boundary == ZeroChain({b_n: 1, a_n: -1})

    plus_boundary = boundary(graph, chain.restricted(v_plus.edge_reps))
    minus_boundary = boundary(graph, chain.restricted(v_minus.edge_reps))
    plus_sum = plus_boundary.total() - plus_boundary[b_n]
    minus_sum = minus_boundary.total() - minus_boundary[a_n]

    cut_plus_ok = _cut_support_ok(engine, xi, eta, plus_boundary, v_plus, b_n)
    cut_minus_ok = _cut_support_ok(engine, xi, eta, minus_boundary, v_minus, a_n)
    return IdealConditionsReport(
        depth=n,
        interior_cycle_ok=interior_ok,
        plus_sum=plus_sum,
        minus_sum=minus_sum,
        plus_sum_ok=plus_sum == -1,
        minus_sum_ok=minus_sum == 1,
        cut_support_plus_ok=cut_plus_ok,
        cut_support_minus_ok=cut_minus_ok,
    )


def _cut_support_ok(engine, xi, eta, restricted_boundary, cone, endpoint):
    """Flux support lies on the thickened cone cut near the geodesic.

    The cut set holds the vertices within the quasigeodesic constant of the
    connecting geodesic that are incident to an edge inside the cone as well
    as one outside; the restricted boundary may only charge its one-step
    thickening and the current endpoint.
    """
    graph = engine.graph
    gamma = graph.fixed_geodesic(xi.rim, eta.rim)
    near = dijkstra(graph._sparse, indices=sorted(set(gamma)),
                    unweighted=True, min_only=True)
    reach = engine.ledger.quasigeodesic_C
    inside_incident = set()
    for e in cone.edge_reps:
        inside_incident.add(int(graph.edge_src[e]))
        inside_incident.add(int(graph.edge_dst[e]))
    cut = {w for w in inside_incident
           if near[w] <= reach and _touches_outside(graph, w, cone)}
    thickened = set(cut)
    for w in cut:
        for e in graph.out_edges(w):
            thickened.add(int(graph.edge_dst[e]))
    support = restricted_boundary.support() - {endpoint}
    return support <= thickened


def _touches_outside(graph, w, cone):
    for e in graph.out_edges(w):
        if graph.edge_rep(int(e)) not in cone.edge_reps:
            return True
    return False


@dataclass(frozen=True)
class NonzeroEdgeReport:
    found: bool
    edge: int | None
    value: object
    distance: int | None
    search_radius: int

    def to_jsonable(self, graph):
        return {
            "found": self.found,
            "edge": None if self.edge is None else graph.edge_ids[self.edge],
            "value": coeff_str(self.value) if self.found else None,
            "distance": self.distance,
            "search_radius": self.search_radius,
        }


def nonzero_edge_search(engine, xi, eta, x, search_radius=None, depth=None):
    """First edge near ``x`` carrying a nonzero extended-combing value.

    The default search radius is the quasigeodesic constant plus ``2 + 3*delta``;
    candidates are ordered by distance then edge index, so the result is
    deterministic.
    """
    import numpy as np

    ledger = engine.ledger
    if search_radius is None:
        search_radius = ledger.quasigeodesic_C + 2 + 3 * ledger.delta
    report = q_ideal(engine, xi, eta, depth=depth)
    chain = report.chain
    graph = engine.graph
    dist = graph.distances_from(x)
    edge_dist = np.minimum(dist[graph.edge_src], dist[graph.edge_dst])
    reps = np.flatnonzero(np.arange(graph.n_edges) < graph.edge_inv)
    reps = reps[edge_dist[reps] <= search_radius]
    order = np.lexsort((reps, edge_dist[reps]))
    for idx in order:
        e = int(reps[idx])
        value = chain.coeffs.get(e, 0)
        if value:
            return NonzeroEdgeReport(found=True, edge=e, value=value,
                                     distance=int(edge_dist[e]),
                                     search_radius=search_radius)
    return NonzeroEdgeReport(found=False, edge=None, value=0, distance=None,
                             search_radius=search_radius)


def cross_ratio_delta_prime(ball, pair_a, pair_b, sigma, x0=None):
    """Inverse-log cross-ratio of two boundary pairs under a visual metric.

    ``sigma`` in (0,1) defines the visual quasi-metric ``sigma ** product``
    on rim endpoints.  Pairs sharing a point give zero; a unit cross-ratio
    gives ``inf``.  Symmetric under swaps inside either pair.
    """
    if not 0 < sigma < 1:
        raise PreconditionError("sigma must lie in (0, 1)")
    (a1, a2), (b1, b2) = pair_a, pair_b
    if a1.rim == a2.rim or b1.rim == b2.rim:
        raise PreconditionError("points inside a pair must be distinct")
    if x0 is None:
        x0 = ball.basepoint
    rims_a = {a1.rim, a2.rim}
    rims_b = {b1.rim, b2.rim}
    if rims_a & rims_b:
        return 0.0
    g = ball.graph
    g11 = g.gromov_product(a1.rim, b1.rim, x0)
    g22 = g.gromov_product(a2.rim, b2.rim, x0)
    g12 = g.gromov_product(a1.rim, b2.rim, x0)
    g21 = g.gromov_product(a2.rim, b1.rim, x0)
    exponent = g11 + g22 - g12 - g21
    if exponent == 0:
        return math.inf
    return 1.0 / abs(float(exponent) * math.log(sigma))
