"""Recovery of the concentrated-layer fields and particle paths on the cone.

A solved energy profile f determines the auxiliary flux h algebraically,
h = (a_forcing - fdot/sin(theta0))/3, and the momentum density y = w_rho*u^t
through the linear ODE  dy/dphi = sin(theta0)*(un - 2*h*y/f).  The layer
fields then follow pointwise: u^t = f/y, w = h/y, w_rho = y**2/f.

f has double zeros at phi = 0 and +-pi, so the ODE coefficient 2h/f blows
up like gamma/(phi - phi*) there.  Near the windward ends +-pi the bounded
solution branch is unique and fixes the starting value through the indicial
relation y ~ sin(theta0)*un(phi*)*(phi - phi*)/(1 + gamma); integration then
proceeds toward phi = 0 on each half, which is the direction in which both
endpoint modes damp numerical perturbations.  Explicit RK4 would be unstable
within ~gamma steps of either end at the default step, so the step is capped
locally to keep |coefficient|*step bounded; elsewhere the fixed default step
is used unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .model import ProblemConfig, pressure_wc
from .spectral import SpectralCoefficients, eval_series

__all__ = [
    "FieldProfile",
    "Trajectory",
    "SingularityTooStrongError",
    "IntegrandUnavailableError",
    "compute_h",
    "integrate_y",
    "recover_fields",
    "integrate_trajectory",
    "DEFAULT_EXCLUSION",
    "DEFAULT_EPS",
    "DEFAULT_BASE_STEP",
]

DEFAULT_EXCLUSION = 5e-2          # valid-mask half width around phi in {-pi, 0, pi}
DEFAULT_EPS = 1e-3                # integration offset from the singular points
DEFAULT_BASE_STEP = 2.0 * math.pi / 8192.0

_SINGULAR_POINTS = (-math.pi, 0.0, math.pi)


class SingularityTooStrongError(RuntimeError):
    """Regular-limit extraction at a singular endpoint failed to stabilize."""

    def __init__(self, endpoint: float, detail: str):
        self.endpoint = endpoint
        super().__init__(f"regular start at phi={endpoint:.6f} unstable: {detail}")


class IntegrandUnavailableError(RuntimeError):
    """Trajectory path runs through a region where w/u^t cannot be formed."""


def compute_h(coeffs: SpectralCoefficients, config: ProblemConfig, grid):
    """Auxiliary flux h on the grid, from the forcing and the slope of f."""
    grid = np.asarray(grid, dtype=float)
    _, fdot, _ = eval_series(coeffs, grid)
    s0 = math.sin(config.theta0)
    return (config.trace.a_forcing(grid) - fdot / s0) / 3.0


def _h_derivative(coeffs: SpectralCoefficients, config: ProblemConfig, phi: float) -> float:
    _, _, fddot = eval_series(coeffs, phi)
    s0 = math.sin(config.theta0)
    return (float(config.trace.a_forcing_derivative(phi)) - fddot / s0) / 3.0


def _indicial_exponent(coeffs, config, phi_star: float):
    """gamma such that 2*sin(theta0)*h/f ~ gamma/(phi - phi*) at a double zero."""
    _, _, fddot = eval_series(coeffs, phi_star)
    if fddot == 0.0:
        raise SingularityTooStrongError(phi_star, "vanishing curvature of f")
    s0 = math.sin(config.theta0)
    return 4.0 * s0 * _h_derivative(coeffs, config, phi_star) / fddot


def _series_f_fdot(coeffs: SpectralCoefficients):
    """Fast scalar (f, fdot) evaluator via the cosine/sine recurrences."""
    b = tuple(float(x) for x in coeffs.b)
    N = coeffs.N

    def evaluate(phi: float):
        c1 = math.cos(phi)
        s1 = math.sin(phi)
        f = b[0] + b[1] * c1
        fdot = -b[1] * s1
        two_c = 2.0 * c1
        c_prev, c_cur = 1.0, c1
        s_prev, s_cur = 0.0, s1
        for n in range(2, N + 1):
            c_prev, c_cur = c_cur, two_c * c_cur - c_prev
            s_prev, s_cur = s_cur, two_c * s_cur - s_prev
            f += b[n] * c_cur
            fdot -= n * b[n] * s_cur
        return f, fdot

    return evaluate


def _rhs_y(coeffs, config):
    s0 = math.sin(config.theta0)
    ca_st = math.cos(config.alpha0) * math.sin(config.theta0)
    sa_ct = math.sin(config.alpha0) * math.cos(config.theta0)
    sa = math.sin(config.alpha0)
    series = _series_f_fdot(coeffs)

    def rhs(phi: float, y: float) -> float:
        f, fdot = series(phi)
        un = ca_st - sa_ct * math.cos(phi)
        a_forcing = -un * sa * math.sin(phi)
        h = (a_forcing - fdot / s0) / 3.0
        if f == 0.0:
            return math.inf
        return s0 * (un - 2.0 * h * y / f)

    return rhs


def _rk4_fixed(rhs, phi_a: float, y_a: float, phi_b: float, nsteps: int) -> float:
    """Classical RK4 with nsteps equal steps from (phi_a, y_a) to phi_b."""
    h = (phi_b - phi_a) / nsteps
    phi, y = phi_a, y_a
    for _ in range(nsteps):
        k1 = rhs(phi, y)
        k2 = rhs(phi + 0.5 * h, y + 0.5 * h * k1)
        k3 = rhs(phi + 0.5 * h, y + 0.5 * h * k2)
        k4 = rhs(phi + h, y + h * k3)
        y += h * (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        phi += h
    return y

def _dist_to_singular(phi: float) -> float:
    return min(abs(phi - p) for p in _SINGULAR_POINTS)


def _leg_steps(
    phi_a: float, phi_b: float, base_step: float, cap_strength: float, d_floor: float
) -> int:
    """Substep count keeping |2 sin(theta0) h/f| * step <= 1 along the leg."""
    length = abs(phi_b - phi_a)
    if length == 0.0:
        return 1
    d = min(_dist_to_singular(phi_a), _dist_to_singular(phi_b))
    lam = cap_strength / max(d, d_floor, 1e-12)
    return max(1, int(math.ceil(length / base_step)), int(math.ceil(length * lam)))


def _windward_start(coeffs, config, phi_star: float, eps: float, rhs, base_step: float):
    """Bounded-branch start state (phi_s, y_s, d_floor) beside a windward end.

    The truncation leaves a small boundary value f_star = f(phi_star); the
    double-zero asymptotics hold only beyond d_const = sqrt(2|f_star|/fddot).
    Three regimes:

    * d_const << eps: the defect is invisible at the offset; start at
      phi_star -+ eps on the indicial line y = A*(phi - phi_star).
    * f_star > 0: the truncated coefficient is regular at the endpoint, and
      odd symmetry pins y(phi_star) = 0; start there exactly.
    * f_star < 0: the truncated f crosses zero a distance ~d_const inside,
      so start beyond it at 3*d_const on the indicial line.

    A throwaway march to a reference offset in the asymptotic zone checks
    that the indicial line actually controls the branch; drift beyond 30%
    raises SingularityTooStrongError.
    """
    f_star, _, fddot = eval_series(coeffs, phi_star)
    if not fddot > 0.0:
        raise SingularityTooStrongError(phi_star, f"nonpositive curvature {fddot:.3e}")
    gamma = 4.0 * math.sin(config.theta0) * _h_derivative(coeffs, config, phi_star) / fddot
    if abs(1.0 + gamma) < 1e-6:
        raise SingularityTooStrongError(phi_star, f"resonant indicial exponent {gamma:.6e}")
    s0 = math.sin(config.theta0)
    A = s0 * float(config.trace.un(phi_star)) / (1.0 + gamma)
    sgn = -1.0 if phi_star > 0 else 1.0  # inward direction, toward phi = 0
    d_const = math.sqrt(2.0 * abs(f_star) / fddot)

    if d_const < 0.25 * eps:
        delta0 = eps
        phi_s, y_s = phi_star + sgn * delta0, A * sgn * delta0
        d_floor = 0.25 * eps
    elif f_star > 0.0:
        delta0 = 0.0
        phi_s, y_s = phi_star, 0.0
        d_floor = 0.5 * d_const
    else:
        delta0 = max(eps, 3.0 * d_const)
        phi_s, y_s = phi_star + sgn * delta0, A * sgn * delta0
        d_floor = 0.5 * d_const

    delta_ref = min(max(4.0 * d_const, 4.0 * delta0, 8.0 * eps), 0.3)
    cap = max(abs(gamma), 1.0)
    ref_point = phi_star + sgn * delta_ref
    m = _leg_steps(phi_s, ref_point, base_step, cap, d_floor)
    y_int = _rk4_fixed(rhs, phi_s, y_s, ref_point, m)
    y_ind = A * sgn * delta_ref
    if not abs(y_int - y_ind) <= 0.3 * abs(y_ind) + 1e-13:
        raise SingularityTooStrongError(
            phi_star,
            f"branch drifted off the indicial line at offset {delta_ref:.3e}: "
            f"{y_ind:.6e} vs {y_int:.6e}",
        )
    return phi_s, y_s, d_floor


def integrate_y(
    coeffs: SpectralCoefficients,
    config: ProblemConfig,
    grid,
    *,
    eps: float = DEFAULT_EPS,
    base_step: float = DEFAULT_BASE_STEP,
):
    """Momentum density y = w_rho*u^t on the grid nodes.

    Integrates each half interval from the windward end toward phi = 0 with
    RK4 on the bounded solution branch.  Nodes closer than eps to a singular
    point (or windward of a defect-shifted start) are returned as NaN.
    """
    if config.alpha0 == 0.0:
        raise IntegrandUnavailableError(
            "f vanishes identically at zero incidence; use the closed-form fields"
        )
    grid = np.asarray(grid, dtype=float)
    rhs = _rhs_y(coeffs, config)
    gamma_cap = max(
        abs(_indicial_exponent(coeffs, config, math.pi)),
        abs(_indicial_exponent(coeffs, config, 0.0)),
        1.0,
    )
    y = np.full(grid.shape, np.nan)

    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        for sign in (1.0, -1.0):
            phi_cur, y_cur, d_floor = _windward_start(
                coeffs, config, sign * math.pi, eps, rhs, base_step
            )
            inside = (sign * grid > eps) & (sign * grid < sign * phi_cur)
            idx = np.where(inside)[0]
            order = idx[np.argsort(-sign * grid[idx])]  # sweep toward phi = 0
            for i in order:
                tgt = float(grid[i])
                m = _leg_steps(phi_cur, tgt, base_step, gamma_cap, d_floor)
                y_cur = _rk4_fixed(rhs, phi_cur, y_cur, tgt, m)
                phi_cur = tgt
                y[i] = y_cur

    return y


@dataclass(frozen=True)
class FieldProfile:
    """Layer fields sampled on a uniform azimuth grid.

    valid_mask is False inside the exclusion windows around phi in
    {-pi, 0, pi} (where y -> 0 makes the pointwise quotients singular) and
    wherever a field could not be formed.  Parity: f, w, w_rho, wc are even;
    fdot, h, y, ut are odd.
    """

    phi_grid: np.ndarray
    f: np.ndarray
    fdot: np.ndarray
    h: np.ndarray
    y: np.ndarray
    ut: np.ndarray
    w: np.ndarray
    w_rho: np.ndarray
    wc: np.ndarray
    valid_mask: np.ndarray
    coeffs: SpectralCoefficients = field(repr=False, compare=False, default=None)
    config: ProblemConfig = field(repr=False, compare=False, default=None)

    def columns(self) -> dict:
        """Field arrays keyed by their CSV column names."""
        return {
            "phi": self.phi_grid,
            "f": self.f,
            "fdot": self.fdot,
            "h": self.h,
            "y": self.y,
            "ut": self.ut,
            "w": self.w,
            "w_rho": self.w_rho,
            "Wc": self.wc,
            "valid": self.valid_mask,
        }


def default_field_grid(n: int = 2048) -> np.ndarray:
    """Uniform grid on [-pi, pi] inclusive; symmetric node pairing for parity."""
    return np.linspace(-math.pi, math.pi, n)


def recover_fields(
    coeffs: SpectralCoefficients,
    config: ProblemConfig,
    grid=None,
    *,
    exclusion: float = DEFAULT_EXCLUSION,
    eps: float = DEFAULT_EPS,
    base_step: float = DEFAULT_BASE_STEP,
) -> FieldProfile:
    """Build the full FieldProfile for a solved coefficient vector.

    Zero incidence bypasses the integration entirely: the layer state is the
    closed-form w_rho = tan(theta0)/2, w = cos(theta0), u^t = 0.
    """
    if grid is None:
        grid = default_field_grid()
    grid = np.asarray(grid, dtype=float)
    f, fdot, _ = eval_series(coeffs, grid)
    wc = pressure_wc(f, grid, config)

    if config.alpha0 == 0.0:
        n = grid.size
        return FieldProfile(
            phi_grid=grid,
            f=f,
            fdot=fdot,
            h=np.zeros(n),
            y=np.zeros(n),
            ut=np.zeros(n),
            w=np.full(n, math.cos(config.theta0)),
            w_rho=np.full(n, 0.5 * math.tan(config.theta0)),
            wc=wc,
            valid_mask=np.ones(n, dtype=bool),
            coeffs=coeffs,
            config=config,
        )

    h = compute_h(coeffs, config, grid)
    y = integrate_y(coeffs, config, grid, eps=eps, base_step=base_step)
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        ut = f / y
        w = h / y
        w_rho = y**2 / f
    dist = np.minimum.reduce([np.abs(grid - p) for p in _SINGULAR_POINTS])
    mask = (
        (dist >= exclusion)
        & np.isfinite(y)
        & np.isfinite(ut)
        & np.isfinite(w)
        & np.isfinite(w_rho)
    )
    return FieldProfile(grid, f, fdot, h, y, ut, w, w_rho, wc, mask, coeffs, config)


@dataclass(frozen=True)
class Trajectory:
    """A particle path phi -> r(phi) on the cone surface theta = theta0."""

    theta0: float
    phi0: float
    r0: float
    phi: np.ndarray
    r: np.ndarray

    def cartesian(self):
        """(x1, x2, x3) samples of the path in ambient coordinates."""
        x1 = self.r * math.cos(self.theta0)
        x2 = self.r * math.sin(self.theta0) * np.cos(self.phi)
        x3 = self.r * math.sin(self.theta0) * np.sin(self.phi)
        return x1, x2, x3


def _path_integrand(coeffs: SpectralCoefficients, config: ProblemConfig):
    """Closure for w/u^t = h/f evaluated exactly from the series."""
    s0 = math.sin(config.theta0)
    ca_st = math.cos(config.alpha0) * math.sin(config.theta0)
    sa_ct = math.sin(config.alpha0) * math.cos(config.theta0)
    sa = math.sin(config.alpha0)
    series = _series_f_fdot(coeffs)

    def integrand(phi: float) -> float:
        f, fdot = series(phi)
        if f <= 0.0:
            raise IntegrandUnavailableError(
                f"f(phi) <= 0 at phi={phi:.6f}; layer description broke down"
            )
        un = ca_st - sa_ct * math.cos(phi)
        h = (-un * sa * math.sin(phi) - fdot / s0) / 3.0
        return h / f

    return integrand


def _adaptive_simpson(g, a: float, b: float, tol: float, depth: int = 24) -> float:
    """Recursive adaptive Simpson quadrature of a smooth callable."""
    fa, fm, fb = g(a), g(0.5 * (a + b)), g(b)
    whole = (b - a) * (fa + 4.0 * fm + fb) / 6.0
    return _simpson_refine(g, a, b, fa, fm, fb, whole, tol, depth)


def _simpson_refine(g, a, b, fa, fm, fb, whole, tol, depth):
    m = 0.5 * (a + b)
    lm, rm = 0.5 * (a + m), 0.5 * (m + b)
    flm, frm = g(lm), g(rm)
    left = (m - a) * (fa + 4.0 * flm + fm) / 6.0
    right = (b - m) * (fm + 4.0 * frm + fb) / 6.0
    if depth <= 0 or abs(left + right - whole) <= 15.0 * tol:
        return left + right + (left + right - whole) / 15.0
    return _simpson_refine(g, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) + _simpson_refine(
        g, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1
    )


def integrate_trajectory(
    profile: FieldProfile,
    phi0: float,
    r0: float,
    phi_end: float | None = None,
    *,
    tol: float = 1e-9,
    exclusion: float = DEFAULT_EXCLUSION,
) -> Trajectory:
    """Particle path r(phi) = r0 + integral of w/u^t from phi0.

    The integrand w/u^t equals h/f and is evaluated exactly from the stored
    series, so the quadrature refines freely near the steep windward end.
    Paths live on one half interval; the march stops at the edge of the
    exclusion window when approaching phi = 0 (particles drift leeward and
    accumulate there).
    """
    if not r0 > 0.0:
        raise ValueError("r0 must be positive")
    if profile.coeffs is None or profile.config is None:
        raise IntegrandUnavailableError("profile carries no series to evaluate w/u^t")
    config = profile.config
    if config.alpha0 == 0.0:
        raise IntegrandUnavailableError("zero incidence has no azimuthal drift")
    if phi0 in _SINGULAR_POINTS:
        raise IntegrandUnavailableError(f"phi0={phi0:.6f} sits on the singular set")

    side = 1.0 if phi0 > 0 else -1.0
    stop = side * exclusion  # terminal approach to phi = 0
    if phi_end is None:
        phi_end = stop
    if side * phi_end < 0.0:
        raise IntegrandUnavailableError(
            f"path from {phi0:.6f} to {phi_end:.6f} crosses the exclusion region at phi=0"
        )
    if side > 0:
        phi_end = max(phi_end, stop)  # stop at the window edge when heading to 0
        lo, hi = phi_end, phi0
    else:
        phi_end = min(phi_end, stop)
        lo, hi = phi0, phi_end
    if not (-math.pi < lo < hi < math.pi):
        raise IntegrandUnavailableError(
            f"path ({lo:.6f}, {hi:.6f}) is not a forward march toward phi=0 "
            "inside one half interval"
        )

    integrand = _path_integrand(profile.coeffs, config)

    nodes = profile.phi_grid[(profile.phi_grid > lo) & (profile.phi_grid < hi)]
    stations = np.concatenate([[phi0], nodes[::-1] if side > 0 else nodes, [phi_end]])
    # drop duplicated stations (phi0 or phi_end may coincide with a grid node)
    keep = np.concatenate([[True], np.abs(np.diff(stations)) > 1e-15])
    stations = stations[keep]

    rs = np.empty(stations.size)
    rs[0] = r0
    for i in range(1, stations.size):
        a, b = stations[i - 1], stations[i]
        seg_tol = max(tol * abs(b - a) / (hi - lo), 1e-13)
        rs[i] = rs[i - 1] + _adaptive_simpson(integrand, a, b, seg_tol)
    return Trajectory(config.theta0, phi0, r0, stations, rs)
