"""Numerical laboratory for a nonlinear evolution model with an
inverse-square weight on the unit ball.

The package discretizes radial states on a graded mesh, time-steps the
semidiscrete system with an adaptive implicit-explicit scheme, tracks the
energy-type functionals of the model, and computes certified upper and lower
bounds on the finite-time blow-up moment together with verdicts against the
numerically observed blow-up.
"""
from __future__ import annotations

from ._backend import available_backends, backend_name, set_backend
from .bounds import (
    BlowupReport,
    BoundConstants,
    build_report,
    compute_constants,
    concavity_check,
    gn_constant_estimate,
    growth_rate_exponent,
    hardy_check,
    interpolation_exponent,
    inverse_power_sum_integral,
    lower_bound_time,
    sobolev_constant_estimate,
    upper_bound_negative_energy,
    upper_bound_positive_energy,
)
from .config import (
    ConfigError,
    Experiment,
    ExperimentConfig,
    apply_override,
    build_experiment,
    load_config,
)
from .functionals import (
    FunctionalSnapshot,
    Problem,
    c1_constant,
    energy_j,
    hardy_constant,
    lyapunov,
    modified_energy,
    nehari_i,
    nehari_scaling,
    p_term,
    snapshot,
    stable_set_member,
    well_depth_estimate,
)
from .mesh import (
    RadialMesh,
    ball_volume,
    build_mesh,
    dirichlet_integral,
    grad_l2_sq,
    integrate,
    sphere_area,
    weighted_l2_sq,
)
from .models import (
    ExponentField,
    InitialDatum,
    SourceModulation,
    ValidationReport,
    constant_exponent,
    constant_modulation,
    critical_exponent,
    log_holder_constant,
    make_exponent,
    make_initial,
    make_modulation,
    saturating_modulation,
    separable_exponent,
    validate_exponent,
    validate_modulation,
)
from .solver import (
    BlowupEstimate,
    Operators,
    SolverConfig,
    State,
    TrajectoryRecord,
    assemble_operators,
    detect_blowup_from_record,
    detect_blowup_time,
    run,
    step,
    verify_energy_identity,
    verify_growth_derivative,
    write_trajectory_csv,
)
from .varexp import luxemburg_norm, luxemburg_norm_weighted, modular, modular_weighted

__version__ = "0.1.0"

__all__ = [
    "available_backends",
    "backend_name",
    "set_backend",
    "BlowupReport",
    "BoundConstants",
    "build_report",
    "compute_constants",
    "concavity_check",
    "gn_constant_estimate",
    "growth_rate_exponent",
    "hardy_check",
    "interpolation_exponent",
    "inverse_power_sum_integral",
    "lower_bound_time",
    "sobolev_constant_estimate",
    "upper_bound_negative_energy",
    "upper_bound_positive_energy",
    "ConfigError",
    "Experiment",
    "ExperimentConfig",
    "apply_override",
    "build_experiment",
    "load_config",
    "FunctionalSnapshot",
    "Problem",
    "c1_constant",
    "energy_j",
    "hardy_constant",
    "lyapunov",
    "modified_energy",
    "nehari_i",
    "nehari_scaling",
    "p_term",
    "snapshot",
    "stable_set_member",
    "well_depth_estimate",
    "RadialMesh",
    "ball_volume",
    "build_mesh",
    "dirichlet_integral",
    "grad_l2_sq",
    "integrate",
    "sphere_area",
    "weighted_l2_sq",
    "ExponentField",
    "InitialDatum",
    "SourceModulation",
    "ValidationReport",
    "constant_exponent",
    "constant_modulation",
    "critical_exponent",
    "log_holder_constant",
    "make_exponent",
    "make_initial",
    "make_modulation",
    "saturating_modulation",
    "separable_exponent",
    "validate_exponent",
    "validate_modulation",
    "BlowupEstimate",
    "Operators",
    "SolverConfig",
    "State",
    "TrajectoryRecord",
    "assemble_operators",
    "detect_blowup_from_record",
    "detect_blowup_time",
    "run",
    "step",
    "verify_energy_identity",
    "verify_growth_derivative",
    "write_trajectory_csv",
    "luxemburg_norm",
    "luxemburg_norm_weighted",
    "modular",
    "modular_weighted",
    "__version__",
]
