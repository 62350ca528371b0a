"""Memoized homological combing chains on a truncated ball.

The one-sided chain from ``a`` to ``b`` is defined by recursion on the
distance: move from ``b`` a fixed number of steps (``10*delta``) toward
``a`` through the exactly-averaged waypoint distribution, extend linearly
over that distribution, and append the averaged geodesic segment covering
the last stretch.  All coefficients are exact path-count ratios, so every
identity asserted here is checked with exact arithmetic.

Internally each recursion runs on the shortest-path DAG of its source
vertex; supports never leave the union of geodesics between the endpoints.
"""

from __future__ import annotations

import random
import threading
from collections import OrderedDict
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.sparse.csgraph import dijkstra

from .chains import OneChain, ZeroChain, as_ratio, coeff_str
from .errors import GeodesicCapError, PreconditionError, TrustRadiusError
from .hyperbolicity import fine_delta

__all__ = ["ConstantsLedger", "BicombingEngine", "BoundsReport", "ScanReport"]


@dataclass(frozen=True)
class ConstantsLedger:
    """Thresholds derived from the fine-triangle constant of the ball."""

    delta: int
    fbar_cut: int
    fbar_support_radius: int
    pprime_tail: int
    quasigeodesic_C: int
    coefficient_bound: int

    @classmethod
    def from_delta(cls, delta):
        if delta < 1:
            raise PreconditionError("delta must be a positive integer")
        return cls(
            delta=delta,
            fbar_cut=10 * delta,
            fbar_support_radius=8 * delta,
            pprime_tail=18 * delta,
            quasigeodesic_C=27 * delta,
            coefficient_bound=2003 * delta * delta,
        )

    def to_jsonable(self):
        return {
            "delta": self.delta,
            "fbar_cut": self.fbar_cut,
            "fbar_support_radius": self.fbar_support_radius,
            "pprime_tail": self.pprime_tail,
            "quasigeodesic_C": self.quasigeodesic_C,
            "coefficient_bound": self.coefficient_bound,
        }


class _Source:
    """Per-source BFS bundle: distances, shortest-path DAG, path counts.

    Path counts are computed on first use; short-range chains never touch
    them.
    """

    __slots__ = ("vertex", "dist", "indptr", "preds", "pred_edges",
                 "_counts", "_counts_ready", "_big_counts", "graph")

    def __init__(self, graph, vertex):
        self.graph = graph
        self.vertex = vertex
        dist = graph.distances_from(vertex)
        self.dist = dist
        src, dst = graph.edge_src, graph.edge_dst
        mask = dist[src] + 1 == dist[dst]
        dag = np.flatnonzero(mask).astype(np.int32)
        order = np.argsort(dst[dag], kind="stable")
        dag = dag[order]
        heads = dst[dag]
        n = graph.n_vertices
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, heads + 1, 1)
        np.cumsum(indptr, out=indptr)
        self.indptr = indptr
        self.preds = src[dag].astype(np.int32)
        self.pred_edges = dag
        self._counts = None
        self._counts_ready = False
        self._big_counts = None

    def _count_layers(self):
        graph, dist = self.graph, self.dist
        dag, heads = self.pred_edges, graph.edge_dst[self.pred_edges]
        n = graph.n_vertices
        counts = np.zeros(n, dtype=np.int64)
        counts[self.vertex] = 1
        if len(dag) == 0:
            return counts
        head_layer = dist[heads]
        order = np.argsort(head_layer, kind="stable")
        heads_sorted = heads[order]
        layers = head_layer[order]
        tails = graph.edge_src[dag[order]]
        start = 0
        m = len(order)
        while start < m:
            layer = layers[start]
            stop = start
            while stop < m and layers[stop] == layer:
                stop += 1
            np.add.at(counts, heads_sorted[start:stop],
                      counts[tails[start:stop]])
            if counts.max() >= 2**61:
                return None  # overflow: fall back to exact big integers
            start = stop
        return counts

    def count(self, v):
        """Exact number of geodesics from the source to ``v``."""
        if not self._counts_ready:
            self._counts = self._count_layers()
            self._counts_ready = True
        if self._counts is not None:
            return int(self._counts[v])
        if self._big_counts is None:
            self._big_counts = self._count_big()
        return self._big_counts.get(v, 0)

    def _count_big(self):
        graph, dist = self.graph, self.dist
        order = np.argsort(dist, kind="stable")
        counts = {self.vertex: 1}
        for v in order:
            v = int(v)
            if v == self.vertex:
                continue
            lo, hi = self.indptr[v], self.indptr[v + 1]
            total = 0
            for i in range(lo, hi):
                total += counts.get(int(self.preds[i]), 0)
            counts[v] = total
        return counts

    def pred_items(self, v):
        lo, hi = int(self.indptr[v]), int(self.indptr[v + 1])
        return zip(self.preds[lo:hi], self.pred_edges[lo:hi])


def _add_scaled(target, source, factor):
    if not factor:
        return target
    for e, c in source.items():
        new = target.get(e, 0) + factor * c
        if new:
            target[e] = new
        else:
            target.pop(e, None)
    return target


def _raw_boundary(graph, chain):
    out = {}
    src, dst = graph.edge_src, graph.edge_dst
    for e, c in chain.items():
        h, t = int(dst[e]), int(src[e])
        nh = out.get(h, 0) + c
        if nh:
            out[h] = nh
        else:
            out.pop(h, None)
        nt = out.get(t, 0) - c
        if nt:
            out[t] = nt
        else:
            out.pop(t, None)
    return out


class BicombingEngine:
    """Exact combing chains with a synchronized memo over ordered pairs.

    The ball, ledger and all cached values are immutable once computed;
    concurrent calls are serialized by an internal lock and produce results
    identical to serial execution.
    """

    def __init__(self, ball, delta=None, strict_trust=True,
                 geodesic_cap=10**6, source_cache_size=512,
                 delta_samples=2000, delta_seed=0):
        self.ball = ball
        self.graph = ball.graph
        if delta is None:
            if ball.delta_hint is not None:
                delta = ball.delta_hint
            else:
                delta = fine_delta(ball, mode="sampled", samples=delta_samples,
                                   seed=delta_seed).delta
        self.ledger = ConstantsLedger.from_delta(delta)
        self.strict_trust = strict_trust
        self.geodesic_cap = geodesic_cap
        self._memo = {}
        self._sources = OrderedDict()
        self._source_cache_size = source_cache_size
        self._lock = threading.RLock()

    # -- bookkeeping -----------------------------------------------------------

    def _source(self, a):
        with self._lock:
            src = self._sources.get(a)
            if src is not None:
                self._sources.move_to_end(a)
                return src
        src = _Source(self.graph, a)
        with self._lock:
            self._sources[a] = src
            if len(self._sources) > self._source_cache_size:
                self._sources.popitem(last=False)
        return src

    def clear_cache(self):
        with self._lock:
            self._memo.clear()
            self._sources.clear()

    def _check_trust(self, vertices, check_trust):
        strict = self.strict_trust if check_trust is None else check_trust
        if not strict:
            return
        dist = self.ball.base_distances()
        for v in vertices:
            if int(dist[v]) > self.ball.trust_radius:
                raise TrustRadiusError(
                    f"vertex {self.graph.vertex_ids[v]} lies outside the "
                    f"trust radius {self.ball.trust_radius}")

    # -- averaged geodesic chains ----------------------------------------------

    def _backward_counts(self, src, t, depth):
        """Geodesic counts ``x -> t`` on the carrier slab ``depth`` deep."""
        counts = {t: 1}
        frontier = [t]
        for _ in range(depth):
            nxt = {}
            for v in frontier:
                cv = counts[v]
                for u, _e in src.pred_items(v):
                    u = int(u)
                    nxt[u] = nxt.get(u, 0) + cv
            counts.update(nxt)
            frontier = list(nxt)
        return counts

    def _slab_chain(self, src, x, t, back):
        """Averaged chain of all geodesics from x to t inside the slab."""
        graph, dist = self.graph, src.dist
        total = back.get(x)
        if not total:
            raise PreconditionError("segment start is not on the carrier")
        edge_inv = graph.edge_inv
        edge_dst = graph.edge_dst
        fwd = {x: 1}
        frontier = [x]
        chain = {}
        for layer in range(int(dist[x]), int(dist[t])):
            nxt = {}
            for u in frontier:
                cu = fwd[u]
                for e in graph.out_edges(u):
                    e = int(e)
                    v = int(edge_dst[e])
                    if int(dist[v]) != layer + 1 or v not in back:
                        continue
                    flow = cu * back[v]
                    partner = int(edge_inv[e])
                    if e < partner:
                        chain[e] = chain.get(e, 0) + flow
                    else:
                        chain[partner] = chain.get(partner, 0) - flow
                    nxt[v] = nxt.get(v, 0) + cu
            fwd.update(nxt)
            frontier = list(nxt)
        if fwd.get(t, 0) != total:
            raise AssertionError("path-count bookkeeping mismatch")
        return {e: as_ratio(c, total) for e, c in chain.items() if c}

    def _waypoints(self, src, t, back):
        """Waypoint distribution: the cut-layer slice of the carrier."""
        dist = src.dist
        lo = int(dist[t]) - self.ledger.fbar_cut
        total = src.count(t)
        points = []
        for x in sorted(v for v in back if int(dist[v]) == lo):
            points.append((x, as_ratio(back[x] * src.count(x), total)))
        if sum(w for _x, w in points) != 1:
            raise AssertionError("waypoint weights do not sum to one")
        return points

    def p_avg(self, a, b, check_trust=None):
        """Uniform average of all geodesic chains from a to b."""
        self._check_trust((a, b), check_trust)
        src = self._source(a)
        d = int(src.dist[b])
        if d == 0:
            return OneChain()
        back = self._backward_counts(src, b, d)
        return OneChain(self._slab_chain(src, a, b, back))

    def p_avg_point(self, a, b, r, check_trust=None):
        """Distribution of the point at distance ``r`` from a along geodesics."""
        self._check_trust((a, b), check_trust)
        src = self._source(a)
        d = int(src.dist[b])
        if not 0 <= r <= d:
            raise PreconditionError(f"parameter {r} outside [0, {d}]")
        back = self._backward_counts(src, b, d)
        total = src.count(b)
        out = {}
        for x in sorted(v for v in back if int(src.dist[v]) == r):
            out[x] = as_ratio(back[x] * src.count(x), total)
        return ZeroChain(out)

    def fbar(self, b, a, check_trust=None):
        """Waypoint distribution on the way from b toward a.

        A point mass at ``a`` within the cut distance; otherwise the
        averaged geodesic point at the cut distance from ``b``.
        """
        self._check_trust((a, b), check_trust)
        src = self._source(a)
        d = int(src.dist[b])
        cut = self.ledger.fbar_cut
        if d <= cut:
            return ZeroChain.point(a)
        back = self._backward_counts(src, b, cut)
        return ZeroChain(dict(self._waypoints(src, b, back)))

    # -- the combing recursion ---------------------------------------------------

    def _qprime_raw(self, a, b, memo):
        key = (a, b)
        got = memo.get(key)
        if got is not None:
            return got
        src = self._source(a)
        cut = self.ledger.fbar_cut
        stack = [b]
        staged = {}
        while stack:
            t = stack[-1]
            kt = (a, t)
            if kt in memo:
                stack.pop()
                continue
            d_t = int(src.dist[t])
            if d_t == 0:
                memo[kt] = {}
                stack.pop()
                continue
            if d_t <= cut:
                back = self._backward_counts(src, t, d_t)
                memo[kt] = self._slab_chain(src, a, t, back)
                stack.pop()
                continue
            data = staged.get(t)
            if data is None:
                back = self._backward_counts(src, t, cut)
                data = (back, self._waypoints(src, t, back))
                staged[t] = data
            back, waypoints = data
            missing = [x for x, _w in waypoints if (a, x) not in memo]
            if missing:
                stack.extend(missing)
                continue
            chain = {}
            for x, w in waypoints:
                _add_scaled(chain, memo[(a, x)], w)
                _add_scaled(chain, self._slab_chain(src, x, t, back), w)
            memo[kt] = chain
            staged.pop(t, None)
            stack.pop()
        return memo[key]

    def qprime(self, a, b, check_trust=None):
        """One-sided combing chain; its boundary is exactly ``b - a``."""
        self._check_trust((a, b), check_trust)
        with self._lock:
            raw = self._qprime_raw(a, b, self._memo)
        return OneChain(dict(raw))

    def q(self, a, b, check_trust=None):
        """Antisymmetrized combing chain: half the difference of both sides."""
        self._check_trust((a, b), check_trust)
        with self._lock:
            ab = self._qprime_raw(a, b, self._memo)
            ba = self._qprime_raw(b, a, self._memo)
        half = Fraction(1, 2)
        out = {}
        _add_scaled(out, ab, half)
        _add_scaled(out, ba, -half)
        return OneChain({e: (int(c) if isinstance(c, Fraction)
                             and c.denominator == 1 else c)
                         for e, c in out.items()})

    def cyclic_sum(self, a, b, c, check_trust=None):
        return (self.q(a, b, check_trust) + self.q(b, c, check_trust)
                + self.q(c, a, check_trust))

    def area(self, a, b, c, check_trust=None):
        """Exact l1 norm of the cyclic sum of antisymmetrized chains."""
        return self.cyclic_sum(a, b, c, check_trust).l1()

    # -- verification --------------------------------------------------------------

    def support_distance_to_geodesics(self, a, b, chain, cap=None):
        """Exact max over support vertices of the distance to each geodesic.

        Returns ``(max_distance, n_geodesics)``; the distance oracle is a
        multi-source BFS from the geodesic, independent of the recursion.
        """
        cap = cap or self.geodesic_cap
        support = sorted(chain.support_vertices(self.graph))
        if not support:
            return 0, 0
        geos = self.graph.all_geodesics(a, b, cap=cap)
        worst = 0
        for path in geos.paths:
            on_path = set(path)
            if all(v in on_path for v in support):
                continue
            dist = dijkstra(self.graph._sparse, indices=list(set(path)),
                            unweighted=True, min_only=True)
            worst = max(worst, max(int(dist[v]) for v in support))
        return worst, len(geos.paths)

    def verify_bounds(self, a, b, check_trust=None):
        """Check the norm, support and coefficient bounds for both orders."""
        rows = []
        for x, y in ((a, b), (b, a)):
            chain = self.qprime(x, y, check_trust)
            d = self.graph.distance(x, y)
            bnd = _raw_boundary(self.graph, chain.coeffs)
            expected = {} if x == y else {y: 1, x: -1}
            l1 = chain.l1()
            coeff = chain.linf()
            sup_dist, n_geo = self.support_distance_to_geodesics(x, y, chain)
            rows.append(PairBounds(
                a=x, b=y, distance=d,
                identity_ok=(bnd == expected),
                l1=l1, l1_bound=self.ledger.pprime_tail * d,
                coeff_max=coeff, coeff_bound=self.ledger.coefficient_bound,
                support_distance=sup_dist,
                support_bound=self.ledger.quasigeodesic_C,
                geodesics_checked=n_geo))
        return BoundsReport(rows=tuple(rows))


@dataclass(frozen=True)
class PairBounds:
    a: int
    b: int
    distance: int
    identity_ok: bool
    l1: object
    l1_bound: int
    coeff_max: object
    coeff_bound: int
    support_distance: int
    support_bound: int
    geodesics_checked: int

    @property
    def ok(self):
        return (self.identity_ok and self.l1 <= self.l1_bound
                and self.coeff_max <= self.coeff_bound
                and self.support_distance <= self.support_bound)

    def to_jsonable(self, graph):
        return {
            "a": graph.vertex_ids[self.a],
            "b": graph.vertex_ids[self.b],
            "distance": self.distance,
            "identity_ok": self.identity_ok,
            "l1": coeff_str(self.l1),
            "l1_bound": self.l1_bound,
            "coeff_max": coeff_str(self.coeff_max),
            "coeff_bound": self.coeff_bound,
            "support_distance": self.support_distance,
            "support_bound": self.support_bound,
            "geodesics_checked": self.geodesics_checked,
            "ok": self.ok,
        }


@dataclass(frozen=True)
class BoundsReport:
    rows: tuple

    @property
    def ok(self):
        return all(r.ok for r in self.rows)

    def to_jsonable(self, graph):
        return {"ok": self.ok, "pairs": [r.to_jsonable(graph) for r in self.rows]}


@dataclass
class ScanReport:
    """Outcome of an exhaustive identity-and-bounds scan over vertex pairs."""

    n_sources: int = 0
    n_pairs: int = 0
    n_extended_pairs: int = 0
    violations: list = field(default_factory=list)
    max_l1_ratio: Fraction = Fraction(0)
    max_coeff: object = 0
    min_nonzero_coeff: object = None
    max_support_distance: int = 0
    support_checks_capped: int = 0
    is_tree: bool = False
    seed: int = 0

    @property
    def ok(self):
        return not self.violations

    def to_jsonable(self):
        return {
            "n_sources": self.n_sources,
            "n_pairs": self.n_pairs,
            "n_extended_pairs": self.n_extended_pairs,
            "violations": self.violations[:100],
            "n_violations": len(self.violations),
            "max_l1_ratio": coeff_str(self.max_l1_ratio),
            "max_coeff": coeff_str(self.max_coeff),
            "min_nonzero_coeff": (None if self.min_nonzero_coeff is None
                                  else coeff_str(self.min_nonzero_coeff)),
            "max_support_distance": self.max_support_distance,
            "support_checks_capped": self.support_checks_capped,
            "is_tree": self.is_tree,
            "seed": self.seed,
            "ok": self.ok,
        }


def scan_inner_pairs(engine, extended_sources=0, extended_targets=0, seed=0):
    """Verify the combing identity and all bounds on every ordered inner pair.

    Scans every ordered pair of vertices inside the trust radius; when
    ``extended_sources`` is positive, additionally verifies seeded random
    pairs drawn from the whole ball (the identity and bounds are algebraic
    facts of the recursion and are not limited to the trusted region).
    """
    ball, graph = engine.ball, engine.graph
    inner = [int(v) for v in ball.inner_vertices()]
    report = ScanReport(seed=seed,
                        is_tree=(graph.n_geometric_edges == graph.n_vertices - 1))
    report.n_sources = len(inner)
    for a in inner:
        _scan_source(engine, a, inner, report, extended=False)
    if extended_sources:
        rng = random.Random(seed)
        everything = list(range(graph.n_vertices))
        for _ in range(extended_sources):
            a = rng.choice(everything)
            targets = [rng.choice(everything) for _ in range(extended_targets)]
            _scan_source(engine, a, targets, report, extended=True)
    return report


def _scan_source(engine, a, targets, report, extended):
    graph = engine.graph
    ledger = engine.ledger
    src = engine._source(a)
    memo = {}
    edge_src, edge_dst = graph.edge_src, graph.edge_dst
    geo_cache = {}
    for b in targets:
        chain = engine._qprime_raw(a, b, memo)
        d = int(src.dist[b])
        where = f"q'[{graph.vertex_ids[a]},{graph.vertex_ids[b]}]"
        # exact combing identity
        bnd = _raw_boundary(graph, chain)
        expected = {} if a == b else {b: 1, a: -1}
        if bnd != expected:
            report.violations.append(f"{where}: boundary != b - a")
        # l1 and coefficient bounds
        l1 = 0
        coeff_max = 0
        coeff_min = None
        for c in chain.values():
            c = abs(c)
            l1 += c
            if c > coeff_max:
                coeff_max = c
            if coeff_min is None or c < coeff_min:
                coeff_min = c
        if l1 > ledger.pprime_tail * d:
            report.violations.append(f"{where}: l1 {l1} exceeds {ledger.pprime_tail * d}")
        if coeff_max > ledger.coefficient_bound:
            report.violations.append(f"{where}: coefficient {coeff_max} exceeds bound")
        if d:
            ratio = Fraction(l1, d) if not isinstance(l1, Fraction) else l1 / d
            if ratio > report.max_l1_ratio:
                report.max_l1_ratio = ratio
        if coeff_max > report.max_coeff:
            report.max_coeff = coeff_max
        if coeff_min is not None and (report.min_nonzero_coeff is None
                                      or coeff_min < report.min_nonzero_coeff):
            report.min_nonzero_coeff = coeff_min
        # support within the quasigeodesic neighbourhood of every geodesic
        support = set()
        for e in chain:
            support.add(int(edge_src[e]))
            support.add(int(edge_dst[e]))
        if support:
            worst = _support_worst_distance(engine, a, b, support, geo_cache)
            if worst < 0:
                report.support_checks_capped += 1
            else:
                if worst > ledger.quasigeodesic_C:
                    report.violations.append(
                        f"{where}: support leaves the "
                        f"{ledger.quasigeodesic_C}-neighbourhood")
                if worst > report.max_support_distance:
                    report.max_support_distance = worst
        if extended:
            report.n_extended_pairs += 1
        else:
            report.n_pairs += 1


def area_sweep(engine, samples, seed):
    """Exact cyclic-sum norms over seeded random inner triples.

    Returns the supremum, the distinct values seen, and the raw rows.
    """
    rng = random.Random(seed)
    inner = [int(v) for v in engine.ball.inner_vertices()]
    rows = []
    sup = 0
    for _ in range(samples):
        a, b, c = (rng.choice(inner) for _ in range(3))
        value = engine.area(a, b, c)
        rows.append({"a": a, "b": b, "c": c, "area": value})
        if value > sup:
            sup = value
    values = sorted({coeff_str(r["area"]) for r in rows})
    return {"samples": samples, "seed": seed, "sup": coeff_str(sup),
            "sup_float": float(sup), "distinct_values": values[:50]}, rows


def _support_worst_distance(engine, a, b, support, geo_cache):
    graph = engine.graph
    key = (a, b)
    geos = geo_cache.get(key)
    if geos is None:
        try:
            geos = graph.all_geodesics(a, b, cap=engine.geodesic_cap).paths
        except GeodesicCapError:
            geos = None
        geo_cache[key] = geos
    if geos is None:
        return -1
    worst = 0
    for path in geos:
        on_path = set(path)
        if all(v in on_path for v in support):
            continue
        dist = dijkstra(graph._sparse, indices=list(on_path),
                        unweighted=True, min_only=True)
        worst = max(worst, max(int(dist[v]) for v in support))
    return worst
