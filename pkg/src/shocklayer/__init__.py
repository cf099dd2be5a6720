"""Infinite-thin shock-layer solutions for supersonic flow past a cone.

A cosine-Galerkin spectral discretization turns the singular periodic ODE
for the layer's tangential kinetic energy into a quadratic algebraic system,
solved by Newton iteration with continuation in attack angle.  Post-
processing recovers the surface pressure, the concentrated-layer fields and
particle paths on the cone.
"""

from .model import (
    GasModel,
    NonPositiveBaseError,
    OdeCoefficients,
    ProblemConfig,
    UpstreamTrace,
    chaplygin_min_mach,
    compute_coefficients,
    ode_residual_pointwise,
    pressure_wc,
)
from .postprocess import (
    FieldProfile,
    IntegrandUnavailableError,
    SingularityTooStrongError,
    Trajectory,
    compute_h,
    default_field_grid,
    integrate_trajectory,
    integrate_y,
    recover_fields,
)
from .solver import (
    ContinuationError,
    NewtonConfig,
    NoConvergenceError,
    SingularJacobianError,
    SolveReport,
    continuation_solve,
    default_continuation_steps,
    newton_solve,
)
from .spectral import (
    SpectralCoefficients,
    assemble_F,
    assemble_jacobian,
    cosine_projection,
    eval_series,
    harmonic_residual,
    harmonic_rows,
    quasi_l1_norm,
    residual_function,
)
from .validation import (
    StudyReport,
    chaplygin_reference_check,
    error_study,
    galerkin_oracle,
    monotonicity_study,
    solution_shape_metrics,
    wc_extremum_study,
)

__version__ = "0.1.0"
