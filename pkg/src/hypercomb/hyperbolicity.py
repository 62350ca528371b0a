"""Fine-triangle constants of finite balls, scanned exactly or by sampling.

A triangle with apex ``x`` and far corners ``y, z`` is probed by sliding
comparison points at equal distance ``t`` from ``x`` along chosen geodesics
``[x,y]`` and ``[x,z]`` for ``t`` up to the Gromov product ``(y.z)_x``.  The
scan runs on the half-integer grid of the geometric realization (vertices
and edge midpoints) with doubled-integer arithmetic, so every reported
distance is exact; the returned constant is the integer ceiling of the
supremum, floored at one.  Midpoints of parallel edges between the same
endpoints are folded together.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .errors import BudgetExceededError, PreconditionError

__all__ = ["InscribedTriple", "DeltaReport", "fine_delta", "check_ab6de"]


@dataclass(frozen=True)
class InscribedTriple:
    """Witness data for the worst comparison pair found in a triangle.

    Points are ``(u, u)`` for a vertex or ``(u, v)`` for the midpoint of an
    edge between adjacent vertices; ``param_doubled`` is twice the common
    distance of the comparison points from the apex.
    """

    apex: int
    corner_y: int
    corner_z: int
    side_xy: tuple
    side_xz: tuple
    side_yz: tuple
    inscribed_opposite: tuple
    inscribed_on_xz: tuple
    inscribed_on_xy: tuple
    param_doubled: int
    point_v: tuple
    point_w: tuple
    distance_doubled: int

    def to_jsonable(self, graph):
        name = lambda p: (graph.vertex_ids[p[0]] if p[0] == p[1]
                          else [graph.vertex_ids[p[0]], graph.vertex_ids[p[1]]])
        return {
            "apex": graph.vertex_ids[self.apex],
            "corners": [graph.vertex_ids[self.corner_y],
                        graph.vertex_ids[self.corner_z]],
            "param_doubled": self.param_doubled,
            "point_v": name(self.point_v),
            "point_w": name(self.point_w),
            "distance_doubled": self.distance_doubled,
        }


@dataclass(frozen=True)
class DeltaReport:
    delta: int
    sup_doubled: int
    mode: str
    triples_scanned: int
    worst: InscribedTriple | None
    inner_radius: int
    samples: int = 0
    seed: int = 0

    def to_jsonable(self, graph=None):
        out = {
            "delta": self.delta,
            "sup_doubled": self.sup_doubled,
            "mode": self.mode,
            "triples_scanned": self.triples_scanned,
            "inner_radius": self.inner_radius,
        }
        if self.mode == "sampled":
            out["samples"] = self.samples
            out["seed"] = self.seed
        if self.worst is not None and graph is not None:
            out["worst_triple"] = self.worst.to_jsonable(graph)
        return out


def _point_on(path, t2):
    if t2 % 2 == 0:
        v = path[t2 // 2]
        return (v, v)
    return (path[(t2 - 1) // 2], path[(t2 + 1) // 2])


def _doubled_distance(p, q, dist_rows):
    """Doubled exact distance between half-grid points.

    ``dist_rows`` maps a vertex present as an endpoint of ``p`` to its full
    distance array.
    """
    pu, pv = p
    qu, qv = q
    if pu == pv:
        row = dist_rows[pu]
        if qu == qv:
            return 2 * int(row[qu])
        return 2 * min(int(row[qu]), int(row[qv])) + 1
    if qu == qv:
        return 2 * min(int(dist_rows[pu][qu]), int(dist_rows[pv][qu])) + 1
    if (pu, pv) == (qu, qv) or (pu, pv) == (qv, qu):
        return 0
    best = min(int(dist_rows[pu][qu]), int(dist_rows[pu][qv]),
               int(dist_rows[pv][qu]), int(dist_rows[pv][qv]))
    return 2 * best + 2


class _TriangleScanner:
    def __init__(self, graph):
        self.graph = graph
        self.sup2 = 0
        self.worst = None

    def scan_apex(self, x, y, z, side_xy, side_xz, dist_rows, d_xy, d_xz, d_yz):
        alpha2 = d_xy + d_xz - d_yz
        updated = False
        for t2 in range(alpha2 + 1):
            pv = _point_on(side_xy, t2)
            pw = _point_on(side_xz, t2)
            dd = _doubled_distance(pv, pw, dist_rows)
            if dd > self.sup2:
                self.sup2 = dd
                self.worst = (x, y, z, side_xy, side_xz, t2, pv, pw, dd)
                updated = True
        return updated


def _dist_rows_for(graph, vertices):
    verts = sorted(vertices)
    mat = dijkstra(graph._sparse, indices=verts, unweighted=True)
    if len(verts) == 1:
        mat = mat.reshape(1, -1)
    return {v: mat[i].astype(np.int32) for i, v in enumerate(verts)}


class _LazyRows:
    """Full-graph distance rows, computed on demand and kept for the scan."""

    def __init__(self, graph):
        self.graph = graph
        self.cache = {}

    def __getitem__(self, v):
        row = self.cache.get(v)
        if row is None:
            row = self.graph._bfs(v)
            self.cache[v] = row
        return row


def _finish_report(graph, scanner, mode, scanned, inner_radius,
                   samples=0, seed=0):
    worst = None
    if scanner.worst is not None:
        x, y, z, side_xy, side_xz, t2, pv, pw, dd = scanner.worst
        side_yz = graph.fixed_geodesic(y, z)
        d_xy = graph.distance(x, y)
        d_xz = graph.distance(x, z)
        d_yz = graph.distance(y, z)
        alpha2 = d_xy + d_xz - d_yz
        beta2 = d_xy + d_yz - d_xz  # doubled product at corner y
        worst = InscribedTriple(
            apex=x, corner_y=y, corner_z=z,
            side_xy=side_xy, side_xz=side_xz, side_yz=side_yz,
            inscribed_opposite=_point_on(side_yz, min(beta2, 2 * d_yz)),
            inscribed_on_xz=_point_on(side_xz, alpha2),
            inscribed_on_xy=_point_on(side_xy, alpha2),
            param_doubled=t2, point_v=pv, point_w=pw, distance_doubled=dd)
    delta = max(1, (scanner.sup2 + 1) // 2)
    return DeltaReport(delta=delta, sup_doubled=scanner.sup2, mode=mode,
                       triples_scanned=scanned, worst=worst,
                       inner_radius=inner_radius, samples=samples, seed=seed)


def fine_delta(ball, mode="exact", samples=10_000, seed=0,
               triple_budget=5_000_000, inner_radius=None,
               geodesic_cap=10_000):
    """Smallest positive integer making every scanned triangle fine.

    ``exact`` mode enumerates all triangles with all three vertices inside
    ``inner_radius`` (default: the trust radius) together with every choice
    of geodesic per scanned side; it raises :class:`BudgetExceededError`
    when the combination count would pass ``triple_budget``.  ``sampled``
    mode draws seeded uniform triples and uniform geodesic choices.
    """
    graph = ball.graph
    if inner_radius is None:
        inner_radius = ball.trust_radius
    inner = [int(v) for v in ball.inner_vertices(within=inner_radius)]
    if not inner:
        raise PreconditionError("no inner vertices to scan")
    scanner = _TriangleScanner(graph)
    if mode == "exact":
        scanned = _scan_exact(graph, inner, scanner, triple_budget, geodesic_cap)
        return _finish_report(graph, scanner, "exact", scanned, inner_radius)
    if mode == "sampled":
        scanned = _scan_sampled(graph, inner, scanner, samples, seed)
        return _finish_report(graph, scanner, "sampled", scanned, inner_radius,
                              samples=samples, seed=seed)
    raise PreconditionError(f"unknown mode {mode!r}")


def _scan_exact(graph, inner, scanner, triple_budget, geodesic_cap):
    geo_cache = {}

    def geodesics(u, v):
        key = (u, v) if u <= v else (v, u)
        got = geo_cache.get(key)
        if got is None:
            got = tuple(graph.all_geodesics(*key, cap=geodesic_cap).paths)
            geo_cache[key] = got
        return got if key == (u, v) else tuple(p[::-1] for p in got)

    rows = _LazyRows(graph)
    scanned = 0
    for x in inner:
        dist_x = rows[x]
        for iy, y in enumerate(inner):
            for z in inner[iy:]:
                d_xy = int(dist_x[y])
                d_xz = int(dist_x[z])
                d_yz = int(rows[y][z])
                if d_xy + d_xz == d_yz:
                    continue  # zero product at the apex: only t=0, distance 0
                sides_y = geodesics(x, y)
                sides_z = geodesics(x, z)
                combos = len(sides_y) * len(sides_z)
                scanned += combos
                if scanned > triple_budget:
                    raise BudgetExceededError(
                        "exact fine-delta scan exceeds budget; use sampled mode")
                for sy in sides_y:
                    for sz in sides_z:
                        scanner.scan_apex(x, y, z, sy, sz, rows,
                                          d_xy, d_xz, d_yz)
    return scanned


def _scan_sampled(graph, inner, scanner, samples, seed):
    rng = random.Random(seed)
    scanned = 0
    for _ in range(samples):
        x = rng.choice(inner)
        y = rng.choice(inner)
        z = rng.choice(inner)
        sy = _sample_geodesic(graph, x, y, rng)
        sz = _sample_geodesic(graph, x, z, rng)
        verts = set(sy) | set(sz)
        dist_rows = _dist_rows_for(graph, verts)
        d_xy = graph.distance(x, y)
        d_xz = graph.distance(x, z)
        d_yz = graph.distance(y, z)
        scanner.scan_apex(x, y, z, sy, sz, dist_rows, d_xy, d_xz, d_yz)
        scanned += 1
    return scanned


def _sample_geodesic(graph, a, b, rng):
    """Uniformly random geodesic from a to b, by exact path counting."""
    dist_a = graph.distances_from(a)
    dist_b = graph.distances_from(b)
    d = int(dist_a[b])
    # backward counts: number of geodesics from v to b, for carrier vertices
    counts = {b: 1}
    layer = {b}
    for ell in range(d - 1, -1, -1):
        nxt = {}
        for v in layer:
            for e in graph.out_edges(v):
                u = int(graph.edge_dst[e])
                if dist_a[u] == ell and dist_a[u] + dist_b[u] == d:
                    nxt[u] = nxt.get(u, 0) + counts[v]
        counts.update(nxt)
        layer = set(nxt)
    path = [a]
    u = a
    for ell in range(d):
        options = []
        weights = []
        for e in graph.out_edges(u):
            v = int(graph.edge_dst[e])
            if dist_a[v] == ell + 1 and v in counts:
                options.append(v)
                weights.append(counts[v])
        total = sum(weights)
        pick = rng.randrange(total)
        acc = 0
        for v, w in zip(options, weights):
            acc += w
            if pick < acc:
                u = v
                break
        path.append(u)
    return tuple(path)


@dataclass(frozen=True)
class SlackReport:
    min_slack: int
    violations: tuple
    checked: int


def check_ab6de(graph, v, beta, b0_index, delta):
    """Check the distance-growth bound along a geodesic seen from ``v``.

    ``beta`` is a geodesic vertex path, ``b0_index`` the position of a
    closest point to ``v`` on it.  Verifies
    ``d(v, beta(j)) >= d(v, beta) + |j| - 2*delta`` for every parameter and
    reports the worst slack.
    """
    dist_v = graph.distances_from(v)
    values = [int(dist_v[u]) for u in beta]
    d_v_beta = min(values)
    if values[b0_index] != d_v_beta:
        raise PreconditionError("b0 does not realize the distance to beta")
    slacks = []
    violations = []
    for i, val in enumerate(values):
        j = i - b0_index
        slack = val - (d_v_beta + abs(j) - 2 * delta)
        slacks.append(slack)
        if slack < 0:
            violations.append(j)
    return SlackReport(min_slack=min(slacks), violations=tuple(violations),
                       checked=len(values))
