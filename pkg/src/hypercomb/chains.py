"""Sparse exact chains on vertices and edge orientation classes.

Coefficients are Python ints or :class:`fractions.Fraction`; arithmetic is
exact throughout.  A one-chain stores a single representative per orientation
class ``{e, ebar}`` and the value on the reversed edge is minus the stored
value, so reversing a path negates its chain and opposite traversals cancel.
"""

from __future__ import annotations

from fractions import Fraction

__all__ = ["ZeroChain", "OneChain", "as_ratio", "coeff_str", "coeff_from_str"]


def as_ratio(num, den):
    """Exact ``num / den`` as an int when possible, else a Fraction."""
    num = int(num)
    den = int(den)
    if num % den == 0:
        return num // den
    return Fraction(num, den)


def coeff_str(c):
    """Serialize a coefficient as ``num`` or ``num/den``."""
    return str(Fraction(c))


def coeff_from_str(s):
    f = Fraction(s)
    return int(f) if f.denominator == 1 else f


def _merged(target, source, scale=1):
    for key, value in source.items():
        new = target.get(key, 0) + scale * value
        if new:
            target[key] = new
        else:
            target.pop(key, None)
    return target


class ZeroChain:
    """Finitely supported exact function on vertices."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {v: c for v, c in (coeffs or {}).items() if c}

    @classmethod
    def point(cls, v):
        return cls({v: 1})

    def __getitem__(self, v):
        return self.coeffs.get(v, 0)

    def __eq__(self, other):
        return isinstance(other, ZeroChain) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        return ZeroChain(_merged(dict(self.coeffs), other.coeffs))

    def __sub__(self, other):
        return ZeroChain(_merged(dict(self.coeffs), other.coeffs, -1))

    def __neg__(self):
        return ZeroChain({v: -c for v, c in self.coeffs.items()})

    def scaled(self, factor):
        if not factor:
            return ZeroChain()
        return ZeroChain({v: factor * c for v, c in self.coeffs.items()})

    def support(self):
        return set(self.coeffs)

    def total(self):
        return sum(self.coeffs.values())

    def l1(self):
        return sum(abs(c) for c in self.coeffs.values())

    def is_convex_combination(self):
        """Nonnegative coefficients summing exactly to one."""
        return all(c > 0 for c in self.coeffs.values()) and self.total() == 1

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        items = ", ".join(f"{v}: {coeff_str(c)}" for v, c in sorted(self.coeffs.items()))
        return f"ZeroChain({{{items}}})"


class OneChain:
    """Finitely supported exact function on edge orientation classes.

    ``coeffs`` maps the representative directed edge of each class to its
    value; the reversed edge carries the negated value implicitly.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs=None):
        self.coeffs = {e: c for e, c in (coeffs or {}).items() if c}

    @classmethod
    def from_directed(cls, graph, pairs):
        """Build from ``(directed_edge, coeff)`` pairs, folding orientations."""
        coeffs = {}
        rep = graph.edge_rep
        for e, c in pairs:
            r = rep(e)
            s = c if r == e else -c
            new = coeffs.get(r, 0) + s
            if new:
                coeffs[r] = new
            else:
                coeffs.pop(r, None)
        return cls(coeffs)

    def value_on(self, graph, e):
        """Value on a directed edge, respecting the orientation convention."""
        r = graph.edge_rep(e)
        v = self.coeffs.get(r, 0)
        return v if r == e else -v

    def __eq__(self, other):
        return isinstance(other, OneChain) and self.coeffs == other.coeffs

    def __hash__(self):
        return hash(frozenset(self.coeffs.items()))

    def __add__(self, other):
        return OneChain(_merged(dict(self.coeffs), other.coeffs))

    def __sub__(self, other):
        return OneChain(_merged(dict(self.coeffs), other.coeffs, -1))

    def __neg__(self):
        return OneChain({e: -c for e, c in self.coeffs.items()})

    def scaled(self, factor):
        if not factor:
            return OneChain()
        return OneChain({e: factor * c for e, c in self.coeffs.items()})

    def restricted(self, edge_reps):
        """Restriction to a set of orientation-class representatives."""
        return OneChain({e: c for e, c in self.coeffs.items() if e in edge_reps})

    def support_reps(self):
        return set(self.coeffs)

    def support_vertices(self, graph):
        verts = set()
        for e in self.coeffs:
            verts.add(int(graph.edge_src[e]))
            verts.add(int(graph.edge_dst[e]))
        return verts

    def l1(self):
        """Sum of absolute coefficients, each geometric edge counted once."""
        return sum(abs(c) for c in self.coeffs.values())

    def linf(self):
        return max((abs(c) for c in self.coeffs.values()), default=0)

    def __len__(self):
        return len(self.coeffs)

    def __repr__(self):
        items = ", ".join(f"{e}: {coeff_str(c)}" for e, c in sorted(self.coeffs.items()))
        return f"OneChain({{{items}}})"

    def to_json_dict(self, graph):
        """``{edge-id: "num/den"}`` keyed by representative edge ids."""
        return {
            graph.edge_ids[e]: coeff_str(c)
            for e, c in sorted(self.coeffs.items())
        }

    @classmethod
    def from_json_dict(cls, graph, data):
        pairs = []
        for edge_id, value in data.items():
            e = graph.edge_index(edge_id)
            pairs.append((e, coeff_from_str(value)))
        return cls.from_directed(graph, pairs)
