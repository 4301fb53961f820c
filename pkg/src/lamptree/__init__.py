"""Lamplighter random walks on homogeneous trees.

Word algebra of T_q and the wreath products (Z/r) ≀ T_q, exact Cayley word
lengths with a BFS oracle, closed-form rate-of-escape bounds, and seeded
Monte Carlo estimators that cross-validate the bounds.
"""

from .tree_group import ReducedWord, dist, identity, inverse, is_in_cone, mul, neighbors, reduce
from .wreath import (
    Generator,
    LampConfig,
    ModelKind,
    ModelSpec,
    Move,
    SwitchAt,
    SwsMove,
    WreathElement,
    apply_generator,
    embed,
    identity_element,
    restrict_to_cone,
    translate,
    wreath_inverse,
    wreath_mul,
)
from .geodesic import (
    ResourceLimitError,
    SteinerSummary,
    bfs_oracle,
    length_sws,
    length_walk_or_switch,
    oracle_mismatches,
    steiner_summary,
)
from .analytic import (
    BoundsReport,
    DivergentSeriesError,
    ModelParams,
    bounds_report,
    drift_bounds,
    exact_drift_from_nu1,
    exact_drift_from_nu2,
    green_G,
    hitting_F,
    lamp_state_probs,
    no_switch_F_bar,
    nu_bounds,
    projection_drift,
    sws_constants,
)
from .montecarlo import (
    BoundaryStats,
    EstimateWithCI,
    ExitStats,
    WalkStats,
    estimate_boundary_stats,
    estimate_drift,
    estimate_projection_drift,
    extract_exit_stats,
    run_drift_trials,
    run_exit_trials,
    run_trajectory,
    sample_step,
)

__version__ = "0.1.0"
