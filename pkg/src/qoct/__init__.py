"""Krotov optimal control for open quantum systems with mixed-state targets."""

from .errors import (
    ConfigError,
    DegenerateStateError,
    InvalidStateError,
    MonotonicityError,
    NonConvergenceError,
    NumericalConsistencyError,
    PropagationAccuracyError,
    QoctError,
    UndefinedAngleError,
)
from .functionals import (
    DistanceReport,
    FunctionalSpec,
    costate_seed,
    d_angle,
    d_bures,
    d_hellinger,
    d_hs,
    d_js,
    d_length,
    d_re,
    d_sm,
    d_split,
    d_trace,
    distance_report,
    evaluate_functional,
    tau,
)
from .krotov import (
    IterationRecord,
    KrotovSettings,
    OptimizationResult,
    field_update,
    krotov_optimize,
    shape_function,
)
from .models import (
    OptomechParams,
    cooperativity,
    desk_scale_params,
    g_from_cooperativity,
    optomech_model,
    paper_scale_params,
    qubit_decay_model,
    squeezing_db,
    x1_variance,
)
from .operators import (
    annihilation,
    basis_projector,
    bloch_dot,
    bloch_length,
    check_density_matrix,
    check_hermitian,
    expectation,
    hermitian_sqrt,
    hs_overlap,
    identity,
    partial_trace,
    purity,
    tensor,
    thermal_state,
    von_neumann_entropy,
)
from .propagation import (
    ControlSet,
    SteadyStateResult,
    SystemModel,
    TimeGrid,
    Trajectory,
    adjoint_apply,
    liouville_apply,
    propagate_backward,
    propagate_forward,
    steady_state,
)

__version__ = "0.1.0"
