"""Serre graphs with exact metric helpers.

A graph is given by directed edges carrying a fixpoint-free involution
``e -> ebar`` that swaps endpoints.  Vertices and edges are integer indices;
string ids are kept for I/O.  Distances are unit-edge-length path distances.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from .chains import OneChain, ZeroChain
from .errors import GeodesicCapError, GraphFormatError, GraphStructureError

__all__ = [
    "Graph",
    "GeodesicSet",
    "boundary",
    "path_chain",
    "parse_graph_text",
    "format_graph_text",
]

DEFAULT_GEODESIC_CAP = 10**6


class Graph:
    """Connected Serre graph with bounded valency.

    Parameters are parallel arrays of directed edges: ``edge_src[e]`` and
    ``edge_dst[e]`` are endpoint vertex indices and ``edge_inv[e]`` the
    reversed partner.  Structure is validated at construction and instances
    are immutable afterwards; the distance cache is lock-protected so
    concurrent readers are safe.
    """

    def __init__(self, vertex_ids, edge_ids, edge_src, edge_dst, edge_inv,
                 dist_cache_size=512):
        self.vertex_ids = list(vertex_ids)
        self.edge_ids = list(edge_ids)
        self.edge_src = np.asarray(edge_src, dtype=np.int32)
        self.edge_dst = np.asarray(edge_dst, dtype=np.int32)
        self.edge_inv = np.asarray(edge_inv, dtype=np.int32)
        self._vertex_index = {vid: i for i, vid in enumerate(self.vertex_ids)}
        self._edge_index = {eid: i for i, eid in enumerate(self.edge_ids)}
        if len(self._vertex_index) != len(self.vertex_ids):
            raise GraphStructureError("duplicate vertex ids")
        if len(self._edge_index) != len(self.edge_ids):
            raise GraphStructureError("duplicate edge ids")
        self._validate()
        self._build_adjacency()
        self._dist_cache = {}
        self._dist_order = []
        self._dist_cache_size = dist_cache_size
        self._lock = threading.Lock()
        self._edge_between = None

    # -- construction helpers ------------------------------------------------

    @classmethod
    def undirected(cls, vertex_ids, geometric_edges):
        """Build from undirected ``(u, v)`` pairs given as vertex ids."""
        vertex_ids = list(vertex_ids)
        index = {vid: i for i, vid in enumerate(vertex_ids)}
        edge_ids, src, dst, inv = [], [], [], []
        seen = {}
        for u, v in geometric_edges:
            pair = (u, v) if str(u) <= str(v) else (v, u)
            k = seen.get(pair, 0)
            seen[pair] = k + 1
            suffix = f"#{k}" if k else ""
            e = len(edge_ids)
            edge_ids.append(f"{u}>{v}{suffix}")
            src.append(index[u])
            dst.append(index[v])
            edge_ids.append(f"{v}>{u}{suffix}")
            src.append(index[v])
            dst.append(index[u])
            inv.extend([e + 1, e])
        return cls(vertex_ids, edge_ids, src, dst, inv)

    def _validate(self):
        n, m = len(self.vertex_ids), len(self.edge_ids)
        if n == 0:
            raise GraphStructureError("graph has no vertices")
        for arr, name in ((self.edge_src, "source"), (self.edge_dst, "target")):
            if m and (arr.min() < 0 or arr.max() >= n):
                raise GraphStructureError(f"edge {name} out of range")
        if m:
            inv = self.edge_inv
            if inv.min() < 0 or inv.max() >= m:
                raise GraphStructureError("involution index out of range")
            if np.any(inv == np.arange(m)):
                raise GraphStructureError("involution has a fixed point")
            if np.any(inv[inv] != np.arange(m)):
                raise GraphStructureError("involution is not an involution")
            if np.any(self.edge_src[inv] != self.edge_dst) or np.any(
                    self.edge_dst[inv] != self.edge_src):
                raise GraphStructureError("involution does not swap endpoints")

    def _build_adjacency(self):
        n, m = self.n_vertices, self.n_edges
        order = np.argsort(self.edge_src, kind="stable")
        self._out_edges = order.astype(np.int32)
        self._out_indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(self._out_indptr, self.edge_src + 1, 1)
        np.cumsum(self._out_indptr, out=self._out_indptr)
        data = np.ones(m, dtype=np.int8)
        self._sparse = csr_matrix(
            (data, (self.edge_src, self.edge_dst)), shape=(n, n))
        if m:
            degrees = np.diff(self._out_indptr)
            self.valency_bound = int(degrees.max())
        else:
            self.valency_bound = 0
        # connectivity check via one sweep
        dist = self._bfs(0)
        if np.any(dist < 0):
            raise GraphStructureError("graph is not connected")

    # -- basic accessors -----------------------------------------------------

    @property
    def n_vertices(self):
        return len(self.vertex_ids)

    @property
    def n_edges(self):
        """Number of directed edges (twice the geometric edge count)."""
        return len(self.edge_ids)

    @property
    def n_geometric_edges(self):
        return self.n_edges // 2

    def vertex_index(self, vid):
        try:
            return self._vertex_index[vid]
        except KeyError:
            raise GraphStructureError(f"unknown vertex id {vid!r}") from None

    def edge_index(self, eid):
        try:
            return self._edge_index[eid]
        except KeyError:
            raise GraphStructureError(f"unknown edge id {eid!r}") from None

    def edge_rep(self, e):
        """Representative of the orientation class of directed edge ``e``."""
        partner = int(self.edge_inv[e])
        return e if e < partner else partner

    def edge_reps(self):
        return [e for e in range(self.n_edges) if e < int(self.edge_inv[e])]

    def out_edges(self, v):
        lo, hi = self._out_indptr[v], self._out_indptr[v + 1]
        return self._out_edges[lo:hi]

    def neighbors(self, v):
        return self.edge_dst[self.out_edges(v)]

    def edge_between(self, u, v):
        """Smallest directed edge index from u to v, or None."""
        if self._edge_between is None:
            table = {}
            for e in range(self.n_edges):
                key = (int(self.edge_src[e]), int(self.edge_dst[e]))
                table.setdefault(key, e)
            self._edge_between = table
        return self._edge_between.get((u, v))

    # -- distances -----------------------------------------------------------

    def _bfs(self, v):
        dist = dijkstra(self._sparse, indices=v, unweighted=True)
        out = np.full(self.n_vertices, -1, dtype=np.int32)
        finite = np.isfinite(dist)
        out[finite] = dist[finite].astype(np.int32)
        return out

    def distances_from(self, v):
        """Exact BFS distances from ``v`` as an array indexed by vertex."""
        with self._lock:
            cached = self._dist_cache.get(v)
        if cached is not None:
            return cached
        dist = self._bfs(v)
        dist.setflags(write=False)
        with self._lock:
            if v not in self._dist_cache:
                self._dist_cache[v] = dist
                self._dist_order.append(v)
                if len(self._dist_order) > self._dist_cache_size:
                    evict = self._dist_order.pop(0)
                    self._dist_cache.pop(evict, None)
        return dist

    def distance(self, u, v):
        return int(self.distances_from(u)[v])

    def gromov_product(self, a, b, x0):
        """Exact ``((a . b) at x0)`` as a half-integer Fraction or int."""
        dx = self.distances_from(x0)
        num = int(dx[a]) + int(dx[b]) - self.distance(a, b)
        return num // 2 if num % 2 == 0 else Fraction(num, 2)

    def edge_vertex_distance(self, e, v):
        """Distance from the directed edge ``e`` (as a set) to vertex ``v``."""
        dist = self.distances_from(v)
        return int(min(dist[self.edge_src[e]], dist[self.edge_dst[e]]))

    def edge_distance(self, e, f):
        """Distance between two edges as subsets of the graph."""
        if e == f or int(self.edge_inv[e]) == f:
            return 0
        de = self.distances_from(int(self.edge_src[e]))
        df = self.distances_from(int(self.edge_dst[e]))
        ends = (int(self.edge_src[f]), int(self.edge_dst[f]))
        return int(min(min(de[x], df[x]) for x in ends))

    # -- geodesics -----------------------------------------------------------

    def geodesic_count(self, a, b):
        """Exact number of geodesics from a to b (arbitrary precision)."""
        dist_a = self.distances_from(a)
        dist_b = self.distances_from(b)
        d = int(dist_a[b])
        counts = {a: 1}
        frontier = [a]
        for layer in range(d):
            nxt = {}
            for u in frontier:
                cu = counts[u]
                for e in self.out_edges(u):
                    v = int(self.edge_dst[e])
                    if dist_a[v] == layer + 1 and dist_a[v] + dist_b[v] == d:
                        nxt[v] = nxt.get(v, 0) + cu
            counts.update(nxt)
            frontier = sorted(nxt)
        return counts.get(b, 1 if a == b else 0)

    def all_geodesics(self, a, b, cap=DEFAULT_GEODESIC_CAP):
        """Exhaustive set of geodesic vertex paths from a to b.

        Paths come out in lexicographic vertex-index order; the first one is
        the canonical fixed choice used elsewhere.  Raises
        :class:`GeodesicCapError` when the count exceeds ``cap``.
        """
        count = self.geodesic_count(a, b)
        if count > cap:
            raise GeodesicCapError(count, cap)
        dist_b = self.distances_from(b)
        d = int(dist_b[a])
        paths = []
        path = [a]

        def extend(u, remaining):
            if remaining == 0:
                paths.append(tuple(path))
                return
            nbrs = sorted(
                {int(self.edge_dst[e]) for e in self.out_edges(u)
                 if dist_b[self.edge_dst[e]] == remaining - 1})
            for v in nbrs:
                path.append(v)
                extend(v, remaining - 1)
                path.pop()

        extend(a, d)
        return GeodesicSet(a, b, tuple(paths))

    def fixed_geodesic(self, a, b):
        """The lexicographically smallest geodesic vertex path from a to b."""
        dist_b = self.distances_from(b)
        path = [a]
        u = a
        for remaining in range(int(dist_b[a]), 0, -1):
            u = min(int(self.edge_dst[e]) for e in self.out_edges(u)
                    if dist_b[self.edge_dst[e]] == remaining - 1)
            path.append(u)
        return tuple(path)


@dataclass(frozen=True)
class GeodesicSet:
    """All geodesic vertex paths between a fixed pair of endpoints."""

    a: int
    b: int
    paths: tuple

    def __len__(self):
        return len(self.paths)

    def __iter__(self):
        return iter(self.paths)

    @property
    def length(self):
        return len(self.paths[0]) - 1 if self.paths else 0


# -- chain operations tied to a graph ----------------------------------------


def boundary(graph, chain):
    """Boundary zero-chain: +coeff at the head, -coeff at the tail."""
    out = {}
    n_edges = graph.n_edges
    src, dst = graph.edge_src, graph.edge_dst
    for e, c in chain.coeffs.items():
        if not 0 <= e < n_edges:
            raise GraphStructureError(f"edge index {e} not in graph")
        h = int(dst[e])
        t = int(src[e])
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
    return ZeroChain(out)


def path_chain(graph, path):
    """One-chain of a vertex path: +1 on every traversed oriented edge."""
    pairs = []
    for u, v in zip(path, path[1:]):
        e = graph.edge_between(u, v)
        if e is None:
            raise GraphStructureError(
                f"vertices {u} and {v} are not adjacent")
        pairs.append((e, 1))
    return OneChain.from_directed(graph, pairs)


# -- line-oriented text format -------------------------------------------------


def parse_graph_text(text):
    """Parse the line-oriented graph format.

    Returns ``(graph, metadata)`` where metadata holds any ``base``,
    ``radius`` and ``trust`` header lines.  Vertex lines are ``v <id>``,
    edge lines ``e <id> <src> <dst> <inv-id>``.
    """
    meta = {}
    vertex_ids = []
    edge_rows = []
    for ln, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind = parts[0]
        if kind == "base" and len(parts) == 2:
            meta["base"] = parts[1]
        elif kind == "radius" and len(parts) == 2:
            meta["radius"] = _parse_int(parts[1], ln)
        elif kind == "trust" and len(parts) == 2:
            meta["trust"] = _parse_int(parts[1], ln)
        elif kind == "v" and len(parts) == 2:
            vertex_ids.append(parts[1])
        elif kind == "e" and len(parts) == 5:
            edge_rows.append((ln, parts[1], parts[2], parts[3], parts[4]))
        else:
            raise GraphFormatError(f"unrecognized line {line!r}", ln)
    vindex = {vid: i for i, vid in enumerate(vertex_ids)}
    if len(vindex) != len(vertex_ids):
        raise GraphFormatError("duplicate vertex id")
    eindex = {}
    for ln, eid, _, _, _ in edge_rows:
        if eid in eindex:
            raise GraphFormatError(f"duplicate edge id {eid!r}", ln)
        eindex[eid] = len(eindex)
    edge_ids, src, dst, inv = [], [], [], []
    for ln, eid, s, t, inv_id in edge_rows:
        if s not in vindex:
            raise GraphFormatError(f"unknown source vertex {s!r}", ln)
        if t not in vindex:
            raise GraphFormatError(f"unknown target vertex {t!r}", ln)
        if inv_id not in eindex:
            raise GraphFormatError(f"unknown inverse edge {inv_id!r}", ln)
        edge_ids.append(eid)
        src.append(vindex[s])
        dst.append(vindex[t])
        inv.append(eindex[inv_id])
    try:
        graph = Graph(vertex_ids, edge_ids, src, dst, inv)
    except GraphStructureError as exc:
        raise GraphFormatError(str(exc)) from exc
    if "base" in meta:
        if meta["base"] not in vindex:
            raise GraphFormatError(f"unknown basepoint {meta['base']!r}")
        meta["base_index"] = vindex[meta["base"]]
    return graph, meta


def _parse_int(token, ln):
    try:
        return int(token)
    except ValueError:
        raise GraphFormatError(f"expected an integer, got {token!r}", ln) from None


def format_graph_text(graph, base=None, radius=None, trust=None):
    """Serialize a graph (and optional ball metadata) deterministically."""
    lines = []
    if base is not None:
        lines.append(f"base {graph.vertex_ids[base]}")
    if radius is not None:
        lines.append(f"radius {radius}")
    if trust is not None:
        lines.append(f"trust {trust}")
    for vid in graph.vertex_ids:
        lines.append(f"v {vid}")
    inv = graph.edge_inv
    for e, eid in enumerate(graph.edge_ids):
        lines.append(
            "e {} {} {} {}".format(
                eid,
                graph.vertex_ids[int(graph.edge_src[e])],
                graph.vertex_ids[int(graph.edge_dst[e])],
                graph.edge_ids[int(inv[e])],
            ))
    return "\n".join(lines) + "\n"
