"""Reduction of mixed-derivative evolution schemes to explicit ODEs.

Spatial discretizations of equations of the form (u_t + g)_x = f determine
du/dt only up to a constant; this package computes the correction constant
that keeps the discrete constraint sum(f) flat, provides the generalized
inverses of the classical difference operators (with their per-wavenumber
error analysis), and ships a small catalog of equations with time
integrators, monitors and a CLI on top.
"""

__version__ = "0.1.0"

from .grid import (
    GridFunction,
    GridMismatchError,
    PeriodicGrid,
    inner,
    make_grid,
    mean,
    project_zero_mean,
)
from .operators import (
    CirculantOperator,
    CompactMaskSingularError,
    NotZeroMeanError,
    OperatorPair,
    identity_operator,
    make_pair,
    make_standard,
    trap_antiderivative,
)
from .wavenumber import (
    ErrorCurve,
    ModeOutOfRangeError,
    PoleAtMultipleOfPiError,
    approx_band_integral,
    build_error_curve,
    closed_form_error,
    exact_band_integral,
    relative_error,
    standard_error_pairs,
)
from .reduction import (
    DegenerateConstraintError,
    EquationDef,
    ReducedODE,
    constraint_gradient,
    correction_constant,
    differential_residual,
    discrete_constraint,
    frozen_sg_rhs,
    ladder_probe,
    reduce,
)
from .catalog import (
    EQUATIONS,
    build_equation,
    initial_data_generators,
    make_initial_data,
    projected_kink,
)
from .timestepping import (
    ConvergenceReport,
    NoConvergenceError,
    NonFiniteStateError,
    SimulationRecord,
    SimulationStatus,
    implicit_midpoint_step,
    rk4_step,
    simulate,
    spatial_convergence,
)
from .io import (
    ConfigError,
    SimulationConfig,
    env_seed,
    load_config,
    parse_config,
    read_csv,
    write_csv,
    write_error_curve_outputs,
    write_simulation_outputs,
)
from .verify import CheckResult, run_suites

__all__ = [
    "__version__",
    # grid
    "GridFunction", "GridMismatchError", "PeriodicGrid",
    "inner", "make_grid", "mean", "project_zero_mean",
    # operators
    "CirculantOperator", "CompactMaskSingularError", "NotZeroMeanError",
    "OperatorPair", "identity_operator", "make_pair", "make_standard",
    "trap_antiderivative",
    # wavenumber analysis
    "ErrorCurve", "ModeOutOfRangeError", "PoleAtMultipleOfPiError",
    "approx_band_integral", "build_error_curve", "closed_form_error",
    "exact_band_integral", "relative_error", "standard_error_pairs",
    # reduction
    "DegenerateConstraintError", "EquationDef", "ReducedODE",
    "constraint_gradient", "correction_constant", "differential_residual",
    "discrete_constraint", "frozen_sg_rhs", "ladder_probe", "reduce",
    # catalog
    "EQUATIONS", "build_equation", "initial_data_generators",
    "make_initial_data", "projected_kink",
    # time stepping
    "ConvergenceReport", "NoConvergenceError", "NonFiniteStateError",
    "SimulationRecord", "SimulationStatus", "implicit_midpoint_step",
    "rk4_step", "simulate", "spatial_convergence",
    # io
    "ConfigError", "SimulationConfig", "env_seed", "load_config",
    "parse_config", "read_csv", "write_csv", "write_error_curve_outputs",
    "write_simulation_outputs",
    # verification
    "CheckResult", "run_suites",
]
