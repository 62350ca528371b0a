"""Doubled cocycle on edge pairs built from the extended combing.

The single-pair map sends two rays to the rank-one product of their combing
chain with itself, truncated to edge pairs within a fixed range; the
cocycle is its cyclic sum over a ray triple.  With the alternating combing
chain the single-pair map is symmetric under swapping its rays, so the
cyclic sum is invariant under every permutation of the three rays; the
substance checked here is boundedness of its l1 norm and a nonvanishing
witness pair for distinct rays.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from scipy.sparse.csgraph import dijkstra

from .chains import coeff_str
from .errors import PreconditionError
from .ideal import q_ideal

__all__ = ["CocycleParams", "DoubleChain", "alpha", "omega",
           "nonvanish_check", "l1_bound_report", "permutation_law_report"]


@dataclass(frozen=True)
class CocycleParams:
    """Range constants for the doubled cocycle.

    ``C`` is the quasigeodesic constant, ``D`` the witness-search radius,
    ``L`` the flank offset, ``R`` the pair range and ``M`` the largest
    number of geometric edges in any ball of radius ``R + 1``.
    """

    delta: int
    C: int
    D: int
    L: int
    R: int
    M: int

    def __post_init__(self):
        if self.D < self.C + 2 + 3 * self.delta:
            raise PreconditionError("D must be at least C + 2 + 3*delta")
        if self.L <= 2 * (self.C + self.D + self.delta):
            raise PreconditionError("L must exceed 2*(C + D + delta)")
        if self.R <= 2 * self.L + 2 * self.D:
            raise PreconditionError("R must exceed 2*L + 2*D")

    @classmethod
    def minimal(cls, engine):
        """Smallest integers satisfying the strict inequalities."""
        delta = engine.ledger.delta
        c = engine.ledger.quasigeodesic_C
        d = c + 2 + 3 * delta
        ell = 2 * (c + d + delta) + 1
        r = 2 * ell + 2 * d + 1
        m = _max_edges_in_ball(engine.ball, r + 1)
        return cls(delta=delta, C=c, D=d, L=ell, R=r, M=m)

    def to_jsonable(self):
        return {"delta": self.delta, "C": self.C, "D": self.D,
                "L": self.L, "R": self.R, "M": self.M}


def _max_edges_in_ball(ball, r):
    graph = ball.graph
    if r >= 2 * ball.radius:
        return graph.n_geometric_edges
    best = 0
    for v in range(graph.n_vertices):
        dist = graph.distances_from(v)
        count = sum(
            1 for e in graph.edge_reps()
            if min(int(dist[graph.edge_src[e]]),
                   int(dist[graph.edge_dst[e]])) <= r)
        best = max(best, count)
    return best


class DoubleChain:
    """Sparse exact function on ordered pairs of edge orientation classes."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {p: c for p, c in (coeffs or {}).items() if c}

    def __eq__(self, other):
        return isinstance(other, DoubleChain) and self.coeffs == other.coeffs

    def __add__(self, other):
        out = dict(self.coeffs)
        for p, c in other.coeffs.items():
            new = out.get(p, 0) + c
            if new:
                out[p] = new
            else:
                out.pop(p, None)
        return DoubleChain(out)

    def __neg__(self):
        return DoubleChain({p: -c for p, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other)

    def value(self, pair):
        return self.coeffs.get(pair, 0)

    def l1(self):
        """Sum of absolute values, each representative pair counted once."""
        return sum(abs(c) for c in self.coeffs.values())

    def linf(self):
        return max((abs(c) for c in self.coeffs.values()), default=0)

    def __len__(self):
        return len(self.coeffs)

    def to_json_dict(self, graph):
        return {
            f"{graph.edge_ids[e]}|{graph.edge_ids[f]}": coeff_str(c)
            for (e, f), c in sorted(self.coeffs.items())
        }


def _support_edge_distances(graph, reps):
    """Exact pairwise distances between support edges, as a nested dict."""
    endpoints = sorted({int(graph.edge_src[e]) for e in reps}
                       | {int(graph.edge_dst[e]) for e in reps})
    if not endpoints:
        return {}
    rows = dijkstra(graph._sparse, indices=endpoints, unweighted=True)
    if len(endpoints) == 1:
        rows = rows.reshape(1, -1)
    row_of = {v: rows[i] for i, v in enumerate(endpoints)}
    out = {}
    for e in reps:
        ue, ve = int(graph.edge_src[e]), int(graph.edge_dst[e])
        for f in reps:
            uf, vf = int(graph.edge_src[f]), int(graph.edge_dst[f])
            out[(e, f)] = int(min(row_of[ue][uf], row_of[ue][vf],
                                  row_of[ve][uf], row_of[ve][vf]))
    return out


def alpha(engine, xi, eta, params, depth=None):
    """Rank-one pairing of a ray pair's combing chain with itself.

    The value on an edge pair is the product of the chain's two values when
    the edges are within range ``R`` and zero otherwise; coincident rays
    give the zero chain.
    """
    if xi.rim == eta.rim:
        return DoubleChain(), 0
    report = q_ideal(engine, xi, eta, depth=depth)
    chain = report.chain
    reps = sorted(chain.coeffs)
    distances = _support_edge_distances(engine.graph, reps)
    out = {}
    for e in reps:
        ce = chain.coeffs[e]
        for f in reps:
            if distances[(e, f)] <= params.R:
                out[(e, f)] = ce * chain.coeffs[f]
    return DoubleChain(out), report.depth_used


def omega(engine, xi, eta, zeta, params, depth=None):
    """Cyclic sum of the doubled pairings over a ray triple."""
    a_xy, d1 = alpha(engine, xi, eta, params, depth=depth)
    a_yz, d2 = alpha(engine, eta, zeta, params, depth=depth)
    a_zx, d3 = alpha(engine, zeta, xi, params, depth=depth)
    return a_xy + a_yz + a_zx, (d1, d2, d3)


@dataclass(frozen=True)
class WitnessReport:
    found: bool
    edge_plus: int | None
    edge_minus: int | None
    value: object
    t_index: int
    offset_plus: int
    offset_minus: int
    offsets_clamped: bool
    center_gap: int
    pair_distance: int | None
    term_main: object
    term_second: object
    term_third: object
    depth: int

    def to_jsonable(self, graph):
        eid = lambda e: None if e is None else graph.edge_ids[e]
        return {
            "found": self.found,
            "edge_plus": eid(self.edge_plus),
            "edge_minus": eid(self.edge_minus),
            "value": coeff_str(self.value) if self.found else None,
            "t_index": self.t_index,
            "offset_plus": self.offset_plus,
            "offset_minus": self.offset_minus,
            "offsets_clamped": self.offsets_clamped,
            "center_gap": self.center_gap,
            "pair_distance": self.pair_distance,
            "terms": [coeff_str(self.term_main), coeff_str(self.term_second),
                      coeff_str(self.term_third)],
            "depth": self.depth,
        }


def nonvanish_check(engine, xi, eta, zeta, params, depth=None):
    """Find an edge pair where the cocycle provably does not vanish.

    Follows the flank construction: take the point on the xi-eta geodesic
    closest to the two other sides, move ``L`` along the geodesic both ways
    (clamped to the truncation and reported as such), and search the two
    ``D``-balls for edges of the xi-eta chain on which the other two chains
    vanish.  For such a pair the cocycle value is the nonzero product of
    the two chain values.
    """
    rims = {xi.rim, eta.rim, zeta.rim}
    if len(rims) < 3:
        raise PreconditionError("pairwise-distinct rays required")
    graph = engine.graph
    q_xy = q_ideal(engine, xi, eta, depth=depth)
    q_yz = q_ideal(engine, eta, zeta, depth=depth).chain
    q_zx = q_ideal(engine, zeta, xi, depth=depth).chain
    chain = q_xy.chain

    gamma = graph.fixed_geodesic(xi.rim, eta.rim)
    side_yz = graph.fixed_geodesic(eta.rim, zeta.rim)
    side_zx = graph.fixed_geodesic(zeta.rim, xi.rim)
    near_yz = dijkstra(graph._sparse, indices=sorted(set(side_yz)),
                       unweighted=True, min_only=True)
    near_zx = dijkstra(graph._sparse, indices=sorted(set(side_zx)),
                       unweighted=True, min_only=True)
    gaps = [max(int(near_yz[v]), int(near_zx[v])) for v in gamma]
    t = min(range(len(gamma)), key=lambda i: (gaps[i], i))
    center_gap = gaps[t]

    i_plus = min(t + params.L, len(gamma) - 1)
    i_minus = max(t - params.L, 0)
    clamped = (i_plus != t + params.L) or (i_minus != t - params.L)
    dist_plus = graph.distances_from(gamma[i_plus])
    dist_minus = graph.distances_from(gamma[i_minus])

    def near_edges(dist_row, other_chain):
        found = []
        for e in sorted(chain.coeffs):
            if other_chain.coeffs.get(e, 0):
                continue
            d = int(min(dist_row[graph.edge_src[e]],
                        dist_row[graph.edge_dst[e]]))
            if d <= params.D:
                found.append((d, e))
        found.sort()
        return found

    plus_candidates = near_edges(dist_plus, q_zx)
    minus_candidates = near_edges(dist_minus, q_yz)
    for dp, e in plus_candidates:
        for dm, f in minus_candidates:
            d_ef = graph.edge_distance(e, f)
            if d_ef > params.R:
                continue
            term_main = chain.coeffs[e] * chain.coeffs[f]
            term_second = q_yz.coeffs.get(e, 0) * q_yz.coeffs.get(f, 0)
            term_third = q_zx.coeffs.get(e, 0) * q_zx.coeffs.get(f, 0)
            if term_second == 0 and term_third == 0 and term_main != 0:
                return WitnessReport(
                    found=True, edge_plus=e, edge_minus=f, value=term_main,
                    t_index=t, offset_plus=i_plus - t, offset_minus=t - i_minus,
                    offsets_clamped=clamped, center_gap=center_gap,
                    pair_distance=d_ef, term_main=term_main,
                    term_second=term_second, term_third=term_third,
                    depth=q_xy.depth_used)
    return WitnessReport(
        found=False, edge_plus=None, edge_minus=None, value=0, t_index=t,
        offset_plus=i_plus - t, offset_minus=t - i_minus,
        offsets_clamped=clamped, center_gap=center_gap, pair_distance=None,
        term_main=0, term_second=0, term_third=0, depth=q_xy.depth_used)


def l1_bound_report(engine, triples, params, depth=None):
    """Exact l1 norms of the cocycle over ray triples, with a comparison bound.

    The comparison quantity is ``2 * M * coefficient_bound * max_area``
    where ``max_area`` is the largest cyclic-sum l1 norm seen; degenerate
    triples are skipped and counted.
    """
    sup_l1 = Fraction(0)
    max_area = Fraction(0)
    max_coeff = Fraction(0)
    used = 0
    skipped = 0
    norms = []
    for xi, eta, zeta in triples:
        if len({xi.rim, eta.rim, zeta.rim}) < 3:
            skipped += 1
            continue
        used += 1
        chain, _depths = omega(engine, xi, eta, zeta, params, depth=depth)
        norm = chain.l1()
        norms.append(norm)
        if norm > sup_l1:
            sup_l1 = norm
        for rays in ((xi, eta), (eta, zeta), (zeta, xi)):
            c = q_ideal(engine, rays[0], rays[1], depth=depth).chain
            m = c.linf()
            if m > max_coeff:
                max_coeff = m
        cyc = (q_ideal(engine, xi, eta, depth=depth).chain
               + q_ideal(engine, eta, zeta, depth=depth).chain
               + q_ideal(engine, zeta, xi, depth=depth).chain)
        a = cyc.l1()
        if a > max_area:
            max_area = a
    comparison = 2 * params.M * engine.ledger.coefficient_bound * max_area
    return {
        "n_triples": used,
        "skipped_degenerate": skipped,
        "sup_l1": coeff_str(sup_l1),
        "sup_l1_float": float(sup_l1),
        "max_cyclic_l1": coeff_str(max_area),
        "max_chain_coeff": coeff_str(max_coeff),
        "comparison_bound": coeff_str(comparison),
        "comparison_bound_float": float(comparison),
        "sup_within_comparison": float(sup_l1) <= float(comparison),
        "norms": [coeff_str(v) for v in norms[:50]],
    }


def permutation_law_report(engine, xi, eta, zeta, params, depth=None):
    """Exact permutation behavior of the cocycle on one triple.

    With the alternating combing chain the pairing is even under swapping
    its rays, so the cyclic sum is invariant under all six orderings; the
    report records that law exactly, together with the sign-alternation
    check (which the even pairing cannot satisfy on nonzero chains).
    """
    base, _ = omega(engine, xi, eta, zeta, params, depth=depth)
    results = {}
    orderings = {
        "cyclic_1": (eta, zeta, xi),
        "cyclic_2": (zeta, xi, eta),
        "swap_12": (eta, xi, zeta),
        "swap_13": (zeta, eta, xi),
        "swap_23": (xi, zeta, eta),
    }
    for name, (x, y, z) in orderings.items():
        chain, _ = omega(engine, x, y, z, params, depth=depth)
        results[name + "_equal"] = chain == base
        if name.startswith("swap"):
            results[name + "_negated"] = chain == -base
    q_xy = q_ideal(engine, xi, eta, depth=depth).chain
    q_yx = q_ideal(engine, eta, xi, depth=depth).chain
    results["q_alternating"] = q_yx == -q_xy
    results["invariant_under_s3"] = all(
        results[k] for k in results if k.endswith("_equal"))
    results["sign_alternating"] = base.l1() == 0 or all(
        results[k] for k in results if k.endswith("_negated"))
    return results
