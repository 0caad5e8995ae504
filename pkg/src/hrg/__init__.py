"""Hyperbolic random graphs: generation, measurement, and closed-form predictions.

The model places n vertices in a hyperbolic disk of radius R = 2 ln n + C,
with radial density alpha*sinh(alpha*r)/(cosh(alpha*R) - 1) and uniform
angles, and connects every pair at hyperbolic distance at most R.  The
package provides

* ``geometry``    -- distances, connection-angle thresholds, region measures
* ``sampling``    -- seeded, reproducible coordinate sampling
* ``generator``   -- naive and bucketed edge construction
* ``stats``       -- empirical measurements on generated graphs
* ``predictions`` -- closed-form theoretical values (degree law, clustering,
                     average/maximum degree)
* ``oracle``      -- Monte Carlo references and multi-seed comparison campaigns
* ``cli``         -- command-line workflows (``hrg generate|analyze|...``)
"""

from hrg.geometry import (
    Params,
    PolarPoint,
    distance,
    angle_threshold_exact,
    angle_threshold_approx,
    measure_ball_origin,
    measure_intersection_quadrature,
    measure_intersection_approx,
    double_intersection_regime,
)
from hrg.sampling import SeededStream, CoordinateSet, sample_coordinates, sample_radius, radial_cdf
from hrg.generator import Graph, build_naive, build_bucketed
from hrg.stats import (
    DegreeHistogram,
    PartitionStats,
    StatsReport,
    degree_histogram,
    average_degree,
    max_degree,
    local_clustering,
    global_clustering,
    partition_stats,
    tail_counts,
    powerlaw_slope,
)
from hrg.predictions import (
    PredictionReport,
    upper_incomplete_gamma,
    predicted_degree_fraction,
    predicted_tail_fraction,
    predicted_average_degree,
    expected_degree_at_radius,
    predicted_max_degree_radius_and_exponent,
    degree_k_radius,
    expected_restricted_degree_count,
    expected_inner_count,
    expected_crossing_edges_bound,
)
from hrg.oracle import MCEstimate, BallOrigin, Intersection, Triple, mc_measure, campaign

__version__ = "1.0.0"

__all__ = [
    "Params",
    "PolarPoint",
    "distance",
    "angle_threshold_exact",
    "angle_threshold_approx",
    "measure_ball_origin",
    "measure_intersection_quadrature",
    "measure_intersection_approx",
    "double_intersection_regime",
    "SeededStream",
    "CoordinateSet",
    "sample_coordinates",
    "sample_radius",
    "radial_cdf",
    "Graph",
    "build_naive",
    "build_bucketed",
    "DegreeHistogram",
    "PartitionStats",
    "StatsReport",
    "degree_histogram",
    "average_degree",
    "max_degree",
    "local_clustering",
    "global_clustering",
    "partition_stats",
    "tail_counts",
    "powerlaw_slope",
    "PredictionReport",
    "upper_incomplete_gamma",
    "predicted_degree_fraction",
    "predicted_tail_fraction",
    "predicted_average_degree",
    "expected_degree_at_radius",
    "predicted_max_degree_radius_and_exponent",
    "degree_k_radius",
    "expected_restricted_degree_count",
    "expected_inner_count",
    "expected_crossing_edges_bound",
    "MCEstimate",
    "BallOrigin",
    "Intersection",
    "Triple",
    "mc_measure",
    "campaign",
    "__version__",
]
