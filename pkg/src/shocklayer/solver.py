"""Newton iteration for the Galerkin system, with continuation in attack angle.

The quadratic system F(b) = 0 is solved by damped Newton steps
b <- b - damping * DF(b)^{-1} F(b) using a dense direct linear solve.
Because the zero-incidence problem is solved exactly by b = 0, initial
guesses for finite incidence come from walking the attack angle up in
equal increments and warm-starting each solve with the previous solution.
Identical inputs produce bit-identical iterates.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace

import numpy as np

from .model import OdeCoefficients, ProblemConfig, compute_coefficients
from .spectral import SpectralCoefficients, assemble_F, assemble_jacobian

__all__ = [
    "NewtonConfig",
    "SolveReport",
    "SingularJacobianError",
    "NoConvergenceError",
    "ContinuationError",
    "newton_solve",
    "continuation_solve",
    "default_continuation_steps",
]

# Reciprocal-condition threshold below which the linear solve is refused.
RCOND_FLOOR = 1e-14


class SingularJacobianError(RuntimeError):
    """Jacobian too ill-conditioned to trust the Newton step."""

    def __init__(self, iteration: int, rcond: float):
        self.iteration = iteration
        self.rcond = rcond
        super().__init__(
            f"Jacobian reciprocal condition {rcond:.3e} below {RCOND_FLOOR:.0e} "
            f"at iteration {iteration}"
        )


class NoConvergenceError(RuntimeError):
    """Step norm failed to drop below tolerance within the iteration budget."""

    def __init__(self, iterations: int, step_norm: float):
        self.iterations = iterations
        self.step_norm = step_norm
        super().__init__(
            f"no convergence after {iterations} iterations (last step norm {step_norm:.3e})"
        )


class ContinuationError(RuntimeError):
    """A continuation stage failed; carries the offending attack angle."""

    def __init__(self, alpha_k: float, stage: int, cause: Exception):
        self.alpha_k = alpha_k
        self.stage = stage
        super().__init__(f"continuation stage {stage} (alpha={alpha_k:.6f}) failed: {cause}")


@dataclass(frozen=True)
class NewtonConfig:
    """Iteration controls for the Newton solve.

    tolerance applies to the chosen norm of the update step; damping_factor
    scales every step (1.0 is the plain method).
    """

    max_iterations: int = 50
    tolerance: float = 1e-12
    damping_factor: float = 1.0
    norm_kind: str = "max_abs"  # or "euclidean"

    def __post_init__(self):
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be >= 1")
        if not self.tolerance > 0:
            raise ValueError("tolerance must be positive")
        if not 0.0 < self.damping_factor <= 1.0:
            raise ValueError("damping_factor must lie in (0, 1]")
        if self.norm_kind not in ("max_abs", "euclidean"):
            raise ValueError("norm_kind must be 'max_abs' or 'euclidean'")

    def step_norm(self, step: np.ndarray) -> float:
        if self.norm_kind == "max_abs":
            return float(np.max(np.abs(step)))
        return float(np.linalg.norm(step))


@dataclass(frozen=True)
class SolveReport:
    """Convergence diagnostics of one Newton solve."""

    converged: bool
    iterations: int
    final_step_norm: float
    final_residual_norm: float
    history: tuple = field(default_factory=tuple)  # per-iteration step norms

    def as_dict(self) -> dict:
        return {
            "converged": self.converged,
            "iterations": self.iterations,
            "final_step_norm": self.final_step_norm,
            "final_residual_norm": self.final_residual_norm,
            "history": list(self.history),
        }


def _newton_raw(fun, jac, x0: np.ndarray, cfg: NewtonConfig):
    """Generic damped Newton core on callables (also drives the unit tests).

    Returns (x, SolveReport); raises SingularJacobianError / NoConvergenceError.
    """
    x = np.array(x0, dtype=float)
    history = []
    for it in range(1, cfg.max_iterations + 1):
        J = jac(x)
        rcond = _reciprocal_condition(J)
        if not rcond > RCOND_FLOOR:
            raise SingularJacobianError(it, rcond)
        step = np.linalg.solve(J, fun(x))
        x = x - cfg.damping_factor * step
        norm = cfg.step_norm(cfg.damping_factor * step)
        history.append(norm)
        if norm < cfg.tolerance:
            resid = float(np.max(np.abs(fun(x))))
            return x, SolveReport(True, it, norm, resid, tuple(history))
    raise NoConvergenceError(cfg.max_iterations, history[-1])


def _reciprocal_condition(J: np.ndarray) -> float:
    sv = np.linalg.svd(J, compute_uv=False)
    if sv[0] == 0.0:
        return 0.0
    return float(sv[-1] / sv[0])


def newton_solve(
    initial: SpectralCoefficients,
    ode: OdeCoefficients,
    cfg: NewtonConfig | None = None,
):
    """Solve F(b) = 0 from the given start; returns (coefficients, report)."""
    cfg = cfg or NewtonConfig()
    N = initial.N

    def fun(x):
        return assemble_F(SpectralCoefficients(N, x), ode)

    def jac(x):
        return assemble_jacobian(SpectralCoefficients(N, x), ode)

    x, report = _newton_raw(fun, jac, initial.b, cfg)
    return SpectralCoefficients(N, x), report


def default_continuation_steps(alpha0: float) -> int:
    """One continuation stage per pi/36 of attack angle, at least one."""
    return max(1, int(np.ceil(abs(alpha0) / (np.pi / 36.0))))


def continuation_solve(
    config: ProblemConfig,
    steps: int | None = None,
    cfg: NewtonConfig | None = None,
):
    """Solve at attack angle alpha0 by walking alpha up from zero.

    Stage k solves at alpha_k = (k/steps)*alpha0, warm-started from the
    previous stage; stage 1 starts from b = 0, exact at zero incidence.
    Returns (coefficients, list of per-stage SolveReports).
    """
    if steps is None:
        steps = default_continuation_steps(config.alpha0)
    if steps < 1:
        raise ValueError("continuation needs at least one stage")
    cfg = cfg or NewtonConfig()
    coeffs = SpectralCoefficients.zeros(config.N)
    reports = []
    for k in range(1, steps + 1):
        alpha_k = config.alpha0 * k / steps
        ode_k = compute_coefficients(replace(config, alpha0=alpha_k))
        try:
            coeffs, report = newton_solve(coeffs, ode_k, cfg)
        except (SingularJacobianError, NoConvergenceError) as err:
            raise ContinuationError(alpha_k, k, err) from err
        reports.append(report)
    return coeffs, reports
