"""Finite Cayley balls for built-in group families, plus graph ingestion.

Built-in families are limited to groups with trivially decidable normal
forms: free groups (reduced words) and free products of finite cyclic
groups (alternating syllables, every nontrivial power of a factor generator
is an edge).  Vertex ids are the normal forms themselves, so identical
parameters always produce byte-identical exports.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

from .errors import GraphFormatError, GraphStructureError, PreconditionError, SizeCapError
from .graph import Graph, format_graph_text, parse_graph_text

__all__ = [
    "TruncatedBall",
    "GroupAction",
    "free_group_ball",
    "free_product_cyclic_ball",
    "ingest_graph",
    "export_ball",
    "ball_from_family",
]

DEFAULT_VERTEX_CAP = 2_000_000

# Margin between the ball radius and the truncation-faithful radius, in
# units of the fine-triangle constant: geodesics between inner vertices can
# leave the union of the two radii by ~2*delta, and the combing recursion
# stays on geodesic carriers, so 4*delta covers both effects with slack.
TRUST_MARGIN_DELTAS = 4


@dataclass(frozen=True)
class GroupAction:
    """A partial graph automorphism given by a vertex relabeling map."""

    name: str
    vertex_map: dict

    def apply_vertex(self, v):
        return self.vertex_map.get(v)

    def apply_edge(self, graph, e):
        u = self.vertex_map.get(int(graph.edge_src[e]))
        v = self.vertex_map.get(int(graph.edge_dst[e]))
        if u is None or v is None:
            return None
        return graph.edge_between(u, v)

    def apply_zero_chain(self, chain):
        out = {}
        for v, c in chain.coeffs.items():
            w = self.vertex_map.get(v)
            if w is None:
                return None
            out[w] = out.get(w, 0) + c
        from .chains import ZeroChain

        return ZeroChain(out)

    def apply_one_chain(self, graph, chain):
        pairs = []
        for e, c in chain.coeffs.items():
            img = self.apply_edge(graph, e)
            if img is None:
                return None
            pairs.append((img, c))
        from .chains import OneChain

        return OneChain.from_directed(graph, pairs)

    def is_adjacency_preserving(self, graph):
        """Check the action respects edges and the involution where defined."""
        for e in range(graph.n_edges):
            img = self.apply_edge(graph, e)
            if img is None:
                continue
            if int(graph.edge_src[img]) != self.vertex_map[int(graph.edge_src[e])]:
                return False
            inv_img = self.apply_edge(graph, int(graph.edge_inv[e]))
            if inv_img is not None and inv_img != int(graph.edge_inv[img]):
                return False
        return True


@dataclass(frozen=True)
class TruncatedBall:
    """A finite metric ball standing in for an infinite hyperbolic graph.

    Pairs of vertices within ``trust_radius`` of the basepoint have
    truncation-faithful distances, geodesic sets and combing supports.
    """

    graph: Graph
    basepoint: int
    radius: int
    trust_radius: int
    family: str = "file"
    delta_hint: int | None = None
    actions: tuple = field(default=())

    def __post_init__(self):
        if not 1 <= self.trust_radius <= self.radius:
            raise GraphStructureError(
                f"trust radius {self.trust_radius} outside [1, {self.radius}]")
        dist = self.graph.distances_from(self.basepoint)
        if int(dist.max()) > self.radius:
            raise GraphStructureError(
                "a vertex lies beyond the declared radius")

    def base_distances(self):
        return self.graph.distances_from(self.basepoint)

    def inner_vertices(self, within=None):
        """Vertices within the trusted region, in index order."""
        limit = self.trust_radius if within is None else within
        dist = self.base_distances()
        return np.flatnonzero(dist <= limit)

    def rim_vertices(self):
        dist = self.base_distances()
        return np.flatnonzero(dist == self.radius)

    def is_inner(self, v):
        return int(self.base_distances()[v]) <= self.trust_radius


def _trust_radius(radius, delta_estimate):
    return max(1, radius - TRUST_MARGIN_DELTAS * max(1, delta_estimate))


# -- free groups ---------------------------------------------------------------


def _free_letters(rank):
    if not 2 <= rank <= 26:
        raise PreconditionError("free rank must be between 2 and 26")
    gens = []
    for i in range(rank):
        lo = chr(ord("a") + i)
        hi = lo.upper()
        gens.extend([lo, hi])
    return gens


def _free_inverse(g):
    return g.lower() if g.isupper() else g.upper()


def free_group_ball(rank, radius, vertex_cap=DEFAULT_VERTEX_CAP):
    """Ball of the Cayley graph of the free group of the given rank.

    The graph is the 2*rank-regular tree truncated at ``radius``; vertex ids
    are freely reduced words ("1" for the identity).
    """
    if radius < 1:
        raise PreconditionError("radius must be positive")
    gens = _free_letters(rank)
    expected = 1 + sum(2 * rank * (2 * rank - 1) ** (i - 1)
                       for i in range(1, radius + 1))
    if expected > vertex_cap:
        raise SizeCapError(
            f"free ball would hold {expected} vertices (cap {vertex_cap})")

    words = [""]
    index = {"": 0}
    frontier = [""]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for g in gens:
                if w and w[-1] == _free_inverse(g):
                    continue
                u = w + g
                if u not in index:
                    index[u] = len(words)
                    words.append(u)
                    nxt.append(u)
        frontier = nxt

    def wid(w):
        return w if w else "1"

    def multiply(w, g):
        if w and w[-1] == _free_inverse(g):
            return w[:-1]
        return w + g

    graph = _cayley_edges(words, index, gens, multiply, _free_inverse, wid)
    actions = _left_actions(words, index, gens, multiply, _free_inverse,
                            prepend=lambda g, w: _free_reduce_prepend(g, w))
    return TruncatedBall(graph, 0, radius, _trust_radius(radius, 1),
                         family=f"free:{rank}", delta_hint=1, actions=actions)


def _free_reduce_prepend(g, w):
    if w and w[0] == _free_inverse(g):
        return w[1:]
    return g + w


# -- free products of finite cyclic groups --------------------------------------


def _cyclic_letters(orders):
    if len(orders) < 2:
        raise PreconditionError("need at least two cyclic factors")
    if len(orders) > 8:
        raise PreconditionError("at most eight cyclic factors supported")
    if any(m < 2 for m in orders):
        raise PreconditionError("cyclic factor orders must be at least 2")
    return [chr(ord("s") + i) for i in range(len(orders))]


def free_product_cyclic_ball(orders, radius, vertex_cap=DEFAULT_VERTEX_CAP):
    """Ball of the Cayley graph of ``Z/m1 * Z/m2 * ...``.

    Generators are all nontrivial powers of each factor generator, so each
    factor contributes a complete graph on its cosets and word length equals
    syllable count of the alternating normal form.
    """
    if radius < 1:
        raise PreconditionError("radius must be positive")
    orders = list(orders)
    letters = _cyclic_letters(orders)
    gens = [(i, e) for i in range(len(orders)) for e in range(1, orders[i])]

    words = [()]
    index = {(): 0}
    frontier = [()]
    for _ in range(radius):
        nxt = []
        for w in frontier:
            for g in gens:
                u = _syllable_multiply(w, g, orders)
                if len(u) <= len(w):
                    continue
                if u not in index:
                    if len(index) >= vertex_cap:
                        raise SizeCapError(
                            f"cyclic-product ball exceeds vertex cap {vertex_cap}")
                    index[u] = len(words)
                    words.append(u)
                    nxt.append(u)
        frontier = nxt

    def wid(w):
        return "".join(f"{letters[f]}{e}" for f, e in w) or "1"

    def multiply(w, g):
        return _syllable_multiply(w, g, orders)

    def inverse(g):
        f, e = g
        return (f, orders[f] - e)

    def glabel(g):
        return f"{letters[g[0]]}{g[1]}"

    graph = _cayley_edges(words, index, gens, multiply, inverse, wid,
                          gen_label=glabel)
    actions = _left_actions(
        words, index, gens, multiply, inverse,
        prepend=lambda g, w: _syllable_prepend(g, w, orders),
        gen_label=glabel)
    delta_est = _cyclic_delta_estimate(tuple(orders))
    return TruncatedBall(graph, 0, radius, _trust_radius(radius, delta_est),
                         family="cyclic:" + ",".join(map(str, orders)),
                         delta_hint=delta_est, actions=actions)


def _syllable_multiply(w, g, orders):
    f, e = g
    if w and w[-1][0] == f:
        ne = (w[-1][1] + e) % orders[f]
        return w[:-1] if ne == 0 else w[:-1] + ((f, ne),)
    return w + ((f, e),)


def _syllable_prepend(g, w, orders):
    f, e = g
    if w and w[0][0] == f:
        ne = (e + w[0][1]) % orders[f]
        return w[1:] if ne == 0 else ((f, ne),) + w[1:]
    return ((f, e),) + w


_CYCLIC_DELTA_CACHE = {}


def _cyclic_delta_estimate(orders):
    """Fine-triangle constant measured exactly on a small ball of the family."""
    if orders in _CYCLIC_DELTA_CACHE:
        return _CYCLIC_DELTA_CACHE[orders]
    from .hyperbolicity import fine_delta

    letters = _cyclic_letters(list(orders))
    gens = [(i, e) for i in range(len(orders)) for e in range(1, orders[i])]
    words = [()]
    index = {(): 0}
    frontier = [()]
    for _ in range(3):
        nxt = []
        for w in frontier:
            for g in gens:
                u = _syllable_multiply(w, g, list(orders))
                if len(u) > len(w) and u not in index:
                    index[u] = len(words)
                    words.append(u)
                    nxt.append(u)
        frontier = nxt
    graph = _cayley_edges(
        words, index, gens,
        lambda w, g: _syllable_multiply(w, g, list(orders)),
        lambda g: (g[0], orders[g[0]] - g[1]),
        lambda w: "".join(f"{letters[f]}{e}" for f, e in w) or "1",
        gen_label=lambda g: f"{letters[g[0]]}{g[1]}")
    probe = TruncatedBall(graph, 0, 3, 3, family="probe")
    report = fine_delta(probe, mode="exact", inner_radius=2)
    _CYCLIC_DELTA_CACHE[orders] = report.delta
    return report.delta


# -- shared Cayley construction --------------------------------------------------


def _cayley_edges(words, index, gens, multiply, inverse, wid, gen_label=None):
    if gen_label is None:
        gen_label = lambda g: g
    vertex_ids = [wid(w) for w in words]
    edge_ids, src, dst, inv = [], [], [], []
    for wi, w in enumerate(words):
        for g in gens:
            u = multiply(w, g)
            ui = index.get(u)
            if ui is None or ui <= wi:
                continue
            e = len(edge_ids)
            edge_ids.append(f"{vertex_ids[wi]}*{gen_label(g)}")
            src.append(wi)
            dst.append(ui)
            edge_ids.append(f"{vertex_ids[ui]}*{gen_label(inverse(g))}")
            src.append(ui)
            dst.append(wi)
            inv.extend([e + 1, e])
    return Graph(vertex_ids, edge_ids, src, dst, inv)


def _left_actions(words, index, gens, multiply, inverse, prepend, gen_label=None):
    """Left-multiplication automorphisms, partial on the truncation."""
    if gen_label is None:
        gen_label = lambda g: g
    actions = []
    for g in gens:
        vmap = {}
        for wi, w in enumerate(words):
            u = prepend(g, w)
            ui = index.get(u)
            if ui is not None:
                vmap[wi] = ui
        actions.append(GroupAction(name=f"left*{gen_label(g)}", vertex_map=vmap))
    return tuple(actions)


# -- ingestion -------------------------------------------------------------------


def ingest_graph(stream):
    """Read a graph file with ``base``/``radius``/``trust`` metadata."""
    if isinstance(stream, (str, bytes)):
        text = stream.decode() if isinstance(stream, bytes) else stream
    else:
        text = stream.read()
    graph, meta = parse_graph_text(text)
    for key in ("base", "radius", "trust"):
        if key not in meta:
            raise GraphFormatError(f"missing required header line {key!r}")
    return TruncatedBall(
        graph,
        meta["base_index"],
        meta["radius"],
        meta["trust"],
        family="file",
    )


def export_ball(ball):
    """Serialize a ball (graph plus metadata) to the text format."""
    return format_graph_text(
        ball.graph, base=ball.basepoint, radius=ball.radius,
        trust=ball.trust_radius)


def ball_from_family(family, radius, vertex_cap=DEFAULT_VERTEX_CAP):
    """Parse a family string like ``free:2``, ``f2`` or ``cyclic:3,3``."""
    if len(family) > 1 and family[0] == "f" and family[1:].isdigit():
        return free_group_ball(int(family[1:]), radius, vertex_cap=vertex_cap)
    kind, _, rest = family.partition(":")
    if kind == "free":
        return free_group_ball(int(rest), radius, vertex_cap=vertex_cap)
    if kind in ("cyclic", "cyclic-product"):
        orders = [int(tok) for tok in rest.split(",") if tok]
        return free_product_cyclic_ball(orders, radius, vertex_cap=vertex_cap)
    raise PreconditionError(f"unknown family {family!r}")


def ingest_or_family(graph_path=None, family=None, radius=None,
                     vertex_cap=DEFAULT_VERTEX_CAP):
    if graph_path is not None:
        with io.open(graph_path, "r", encoding="utf-8") as fh:
            return ingest_graph(fh)
    if family is None or radius is None:
        raise PreconditionError("need either a graph file or family+radius")
    return ball_from_family(family, radius, vertex_cap=vertex_cap)
