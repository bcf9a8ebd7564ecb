"""Lattice minimizing movements for perimeter maximization: nucleation,
checkerboard minimizers, Minkowski-sum growth and limit polygons."""
from .energy import EnergyBreakdown, dissipation, distance_to_complement, scaled_energy
from .errors import *  # noqa: F401,F403
from .lattice import (
    ConvexLatticePolygon,
    LatticeSet,
    boundary_cycle,
    check_monotone_edges,
    check_symmetry,
    convex_hull,
    discrete_edges,
    discrete_vertices,
    effective_boundary,
    is_nondegenerate,
    is_sublattice_convex,
    lattice_perimeter,
    lattice_points_in,
    mfold_identity_check,
    minkowski_sum,
    pick_count,
)
from .limit import (
    FastRegimeBall,
    LimitMotion,
    NucleusReport,
    alpha_critical,
    fast_regime_limit,
    hausdorff_bound,
    hausdorff_gap,
    l1_parity_analysis,
    limit_set,
    nucleus,
    pinning_threshold,
)
from .norms import (
    NormSpec,
    ball_points,
    distance_to_set,
    evaluate,
    is_singular,
    nearest_singular,
    parse_norm,
    projection,
    singular_set,
    verify_hypotheses,
)
from .solver import (
    EvolutionTrace,
    StepResult,
    candidate_window,
    evolve,
    fast_forward,
    parity_flip_bound,
    parity_flip_threshold,
    step_brute,
    step_closed_form,
    step_mincut,
)

__version__ = "0.1.0"
