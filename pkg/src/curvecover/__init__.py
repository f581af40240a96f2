"""Subtrajectory clustering of polygonal curves under the Frechet distance.

Pipeline: simplify each curve, enumerate candidate center subcurves from
extremal free-space coordinates, compute each candidate's coverage, then
greedily cover the simplified curves' parameter spaces by arc length.
"""

from .geometry import (
    CurveParam,
    DegenerateSubcurveError,
    ParameterError,
    PolygonalCurve,
    Subcurve,
    discrete_frechet,
    extract_subcurve,
)
from .freespace import FreeSpaceDiagram, build_free_space, extremal_points, frechet_decision
from .simplification import (
    Simplification,
    SimplificationError,
    delta_good_simplify,
    verify_delta_good,
)
from .coverage import CoverageSet, compute_coverage, union_length
from .candidates import Candidate, collect_extremal_coordinates, enumerate_candidates
from .setcover import (
    UncoverableError,
    build_ground_set,
    greedy_cover,
    independent_set_lower_bound,
)
from .pipeline import Cluster, ClusteringConfig, ClusteringResult, cluster
from .evaluation import Labeling, Metrics, approximation_report, assign_labels, metrics
from .synth import drifter_batch

__version__ = "0.1.0"

__all__ = [
    "Candidate",
    "Cluster",
    "ClusteringConfig",
    "ClusteringResult",
    "CoverageSet",
    "CurveParam",
    "DegenerateSubcurveError",
    "FreeSpaceDiagram",
    "Labeling",
    "Metrics",
    "ParameterError",
    "PolygonalCurve",
    "Simplification",
    "SimplificationError",
    "Subcurve",
    "UncoverableError",
    "approximation_report",
    "assign_labels",
    "build_free_space",
    "build_ground_set",
    "cluster",
    "collect_extremal_coordinates",
    "compute_coverage",
    "delta_good_simplify",
    "discrete_frechet",
    "drifter_batch",
    "enumerate_candidates",
    "extract_subcurve",
    "extremal_points",
    "frechet_decision",
    "greedy_cover",
    "independent_set_lower_bound",
    "metrics",
    "union_length",
    "verify_delta_good",
]
