"""Boosted ground states and dynamics of a coupled cubic NLS system without Galilean symmetry."""

from .grid import FieldPair, ModelParams, SpectralGrid, h1_distance, inner_real, make_grid, spectral_derivatives
from .functionals import (
    FunctionalReport,
    action_suite,
    galilean_boost,
    interaction_d,
    mass,
    momentum,
    pohozaev_residuals,
    snap_velocity,
)
from .ground_state import (
    GroundStateResult,
    SolverConfig,
    make_initial_guess,
    minimize_action,
    nehari_rescale,
    semitrivial_threshold,
    solve_real_elliptic,
)
from .evolution import TrajectoryRecord, detect_blowup, nonlinear_substep_invariant_check, split_step_evolve
from .analysis import (
    APlusCertificate,
    GnConstants,
    aplus_membership,
    global_existence_experiment,
    gn_constants,
    high_frequency_limit,
    nonexistence_sweep,
    scaling_check,
    semitrivial_comparison,
)
from .cli_io import parse_cli, read_snapshot, write_diagnostics, write_report, write_snapshot

__version__ = "0.1.0"
