"""Deterministic simulator for axisymmetric Euler flow outside a cone.

Modules
-------
onedim    scale-invariant angular systems and their blow-up runs
grids     sector geometry and log-radially graded polar grids
diffops   finite-difference derivatives on those grids
elliptic  sector Green's function, singular quadrature, sparse solves
axisym    semi-Lagrangian 2D evolution shadowed by the 1D clock
norms     corner-weighted Hoelder norm estimation
runio     CSV / manifest / binary field formats
cli       scenario runner
"""

from .errors import (
    CflExhaustedError,
    ConfigError,
    DomainError,
    InsufficientResolutionError,
    InvalidParameterError,
    NoBlowupDetectedError,
    ResonanceError,
    SectorEulerError,
    SingularityError,
    StepRejectedError,
    SupportEscapeError,
    SynchronizationError,
    TruncationError,
)
from .grids import (
    Field2D,
    PolarGrid,
    SectorSpec,
    beta_from_eps,
    make_polar_grid,
    make_sector,
    quintic_bump,
)
from .onedim import (
    AngularGrid,
    AngularState,
    BlowupDiagnostics1D,
    Run1DResult,
    diagnostics_1d,
    estimate_blowup_time,
    make_grid,
    make_state,
    run_1d,
    solve_angular_poisson,
    solve_axis_poisson,
    step_1d,
    step_axis_1d,
)
from .elliptic import (
    factorized_operator,
    gradient_quadrature,
    green,
    kernel_K,
    l_solve,
    poisson_quadrature,
    vanishing_exponent,
    velocity_bound_check,
)
from .axisym import (
    FlowState,
    Run2DResult,
    ShadowReport,
    admissible_dt,
    compute_velocity,
    init_blowup_data,
    run_axisym_blowup,
    run_axisym_noswirl,
    shadow_diagnostics,
    step_2d,
)
from .norms import NormEstimate, circ_norm, classical_norm, product_rule_check

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
