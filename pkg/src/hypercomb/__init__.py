"""Exact homological combing chains on finite balls of hyperbolic graphs.

The package builds truncated Cayley balls, measures their fine-triangle
constant, constructs the exactly-averaged combing chains with memoized
recursion, certifies decay envelopes for their differences, extends the
combing to pseudo-boundary rays, and assembles the doubled edge-pair
cocycle, all with exact rational arithmetic.
"""

__version__ = "0.1.0"

from .bicombing import BicombingEngine, ConstantsLedger, area_sweep, scan_inner_pairs
from .chains import OneChain, ZeroChain
from .cocycle import CocycleParams, DoubleChain, alpha, l1_bound_report, nonvanish_check, omega
from .convergence import FittedConstants, certify_envelope, fit_all
from .generators import (
    GroupAction,
    TruncatedBall,
    ball_from_family,
    export_ball,
    free_group_ball,
    free_product_cyclic_ball,
    ingest_graph,
)
from .graph import GeodesicSet, Graph, boundary, path_chain
from .hyperbolicity import InscribedTriple, check_ab6de, fine_delta
from .ideal import (
    PseudoBoundaryPoint,
    check_ideal_conditions,
    cone_neighbourhood,
    cross_ratio_delta_prime,
    nonzero_edge_search,
    q_ideal,
    ray_to,
    sample_diverging_ray_pairs,
    sample_diverging_ray_triples,
)

__all__ = [
    "__version__",
    "BicombingEngine",
    "ConstantsLedger",
    "area_sweep",
    "scan_inner_pairs",
    "OneChain",
    "ZeroChain",
    "CocycleParams",
    "DoubleChain",
    "alpha",
    "omega",
    "nonvanish_check",
    "l1_bound_report",
    "FittedConstants",
    "certify_envelope",
    "fit_all",
    "GroupAction",
    "TruncatedBall",
    "ball_from_family",
    "export_ball",
    "free_group_ball",
    "free_product_cyclic_ball",
    "ingest_graph",
    "GeodesicSet",
    "Graph",
    "boundary",
    "path_chain",
    "InscribedTriple",
    "check_ab6de",
    "fine_delta",
    "PseudoBoundaryPoint",
    "ray_to",
    "q_ideal",
    "check_ideal_conditions",
    "cone_neighbourhood",
    "nonzero_edge_search",
    "cross_ratio_delta_prime",
    "sample_diverging_ray_pairs",
    "sample_diverging_ray_triples",
]
