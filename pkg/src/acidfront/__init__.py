"""Finite-difference simulator for a three-field acid-mediated tumor invasion model."""

from .core import (
    BoundaryKind,
    ConfigError,
    GridSpec,
    InitRecipe,
    InvalidRecipeError,
    ModelParams,
    ParamViolation,
    ScenarioConfig,
    SimState,
    build_initial_state,
    validate_params,
)
from .integrator import (
    NonFiniteStateError,
    RunResult,
    ToleranceExceededError,
    default_record_nodes,
    run,
    stable_dt,
    step_rk4,
)
from .monitor import ViolationReport, check_state
from .reaction import StateDerivative, full_rhs, reaction_rhs
from .scenarios import BASELINE_INIT, BASELINE_PARAMS, PRESET_NAMES, make_preset
from .stencil import LaplacianWorkspace, laplacian
from .theta import (
    MissingTrajectoriesError,
    NodeTrajectory,
    NonPositiveSamplesError,
    ThetaBounds,
    TrajectoryRangeError,
    ode_reference_run,
    ratio_g,
    theta,
    verify_n_field,
)

__version__ = "0.1.0"
