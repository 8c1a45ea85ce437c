"""Data-dependent distances between hyperplanes fit to a point set."""

__version__ = "0.1.0"

from .errors import *  # noqa: F401,F403
from .geometry import (
    EmbeddingVector,
    Hyperplane,
    PointSet,
    canonicalize,
    embed,
    is_full_rank,
    signed_distance,
    signed_distances,
)
from .metrics import (
    LiftedBall,
    ProjectionMatrix,
    dist,
    dist_frobenius,
    dist_unsigned,
    dist_weighted,
    lift_ball,
    lift_membership,
    metric_status,
    projection_matrix,
)
from .sensitivity import (
    Coreset,
    design_matrix,
    estimate_dist,
    leverage_scores,
    sensitivities,
    sensitivity_sample,
)
from .streaming import Sketch, median_estimate, sketch_bounds, sketch_new, sketch_offer
from .trajectories import (
    CurveK,
    LineRepresentation,
    curve_embed,
    curve_to_lines,
    dist_curves,
    lines_to_curve,
    mean_curve,
    mean_oriented_lines,
    simplify_to_k,
)
from .analysis import (
    EstimatorSample,
    UncertainPointSet,
    coreset_quality,
    empirical_ball_probability,
    gonzalez_k_center,
    kde,
    lloyds_k_means,
    siegel_estimator,
    siegel_fit,
    uncertain_siegel_distribution,
)
