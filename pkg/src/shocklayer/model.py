"""Physical setup for a uniform supersonic stream past a straight cone at incidence.

The cone has semi-vertex angle ``theta0`` and the stream hits it at attack
angle ``alpha0``.  Mass concentrates in an infinitesimally thin layer on the
cone surface; the layer is described by the azimuthal profile f(phi) of its
doubled tangential kinetic energy.  f obeys a singular second-order periodic
ODE whose six scalar coefficients, upstream trace functions, pointwise
residual and surface-pressure law live in this module.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "GasModel",
    "ProblemConfig",
    "OdeCoefficients",
    "UpstreamTrace",
    "NonPositiveBaseError",
    "compute_coefficients",
    "ode_residual_pointwise",
    "pressure_wc",
    "chaplygin_min_mach",
]


class NonPositiveBaseError(ValueError):
    """No finite Mach number admits a concentrated layer at some azimuth."""


@dataclass(frozen=True)
class GasModel:
    """Upstream gas law, reduced to the freestream pressure p0.

    Two models are supported:

    * ``hypersonic`` limit: p0 = 0.
    * ``chaplygin`` gas at Mach number ``mach``: p0 = -1/mach**2.

    p0 is derived, never set directly, so the two cannot disagree.
    """

    kind: str = "hypersonic"
    mach: float | None = None

    def __post_init__(self):
        if self.kind not in ("hypersonic", "chaplygin"):
            raise ValueError(f"unknown gas model kind {self.kind!r}")
        if self.kind == "chaplygin":
            if self.mach is None or not self.mach > 0:
                raise ValueError("chaplygin gas requires mach > 0")
        elif self.mach is not None:
            raise ValueError("hypersonic limit takes no mach number")

    @classmethod
    def hypersonic_limit(cls) -> "GasModel":
        return cls("hypersonic")

    @classmethod
    def chaplygin(cls, mach: float) -> "GasModel":
        return cls("chaplygin", float(mach))

    @property
    def p0(self) -> float:
        """Freestream pressure (upstream density is normalized to 1)."""
        if self.kind == "hypersonic":
            return 0.0
        return -1.0 / self.mach**2


@dataclass(frozen=True)
class ProblemConfig:
    """Cone geometry, incidence, gas model and spectral truncation order.

    theta0 : semi-vertex angle, radians, in (0, pi/2)
    alpha0 : attack angle, radians.  The solver accepts any value; physical
        validity (which requires 0 <= alpha0 < theta0) is reported by the
        validity flags, not assumed here.
    gas    : upstream gas model
    N      : cosine truncation order, at least 4 so every fixed low-harmonic
        forcing term has a matching equation row
    """

    theta0: float
    alpha0: float
    gas: GasModel = field(default_factory=GasModel.hypersonic_limit)
    N: int = 8

    def __post_init__(self):
        if not 0.0 < self.theta0 < math.pi / 2:
            raise ValueError("theta0 must lie in (0, pi/2)")
        if int(self.N) != self.N or self.N < 4:
            raise ValueError("truncation order N must be an integer >= 4")
        object.__setattr__(self, "N", int(self.N))

    @property
    def trace(self) -> "UpstreamTrace":
        return UpstreamTrace(self.theta0, self.alpha0)


@dataclass(frozen=True)
class OdeCoefficients:
    """The six scalars weighting the layer-energy ODE.

    a1, a2 weight the odd forcing (a1 sin phi + a2 sin 2phi); a3 the f**2
    term; a4, a5, a6 the linear-in-f weight (a4 + a5 cos phi + a6 cos 2phi).
    At zero attack angle a1 = a2 = a5 = a6 = 0 and only the homogeneous
    balance a3 f**2 + a4 f remains, solved by f = 0.
    """

    a1: float
    a2: float
    a3: float
    a4: float
    a5: float
    a6: float

    def forcing(self, phi):
        """Odd forcing a1 sin(phi) + a2 sin(2 phi)."""
        return self.a1 * np.sin(phi) + self.a2 * np.sin(2.0 * phi)

    def forcing_derivative(self, phi):
        return self.a1 * np.cos(phi) + 2.0 * self.a2 * np.cos(2.0 * phi)

    def linear_weight(self, phi):
        """Even weight a4 + a5 cos(phi) + a6 cos(2 phi) of the f term."""
        return self.a4 + self.a5 * np.cos(phi) + self.a6 * np.cos(2.0 * phi)


def compute_coefficients(config: ProblemConfig) -> OdeCoefficients:
    """Evaluate the six ODE coefficients from the cone and attack angles."""
    t0, al = config.theta0, config.alpha0
    s = math.sin(t0)
    a1 = -(2.0 / 3.0) * s * s * math.sin(2.0 * al)
    a2 = (1.0 / 3.0) * math.sin(2.0 * t0) * math.sin(al) ** 2
    a3 = 3.0 * s * s
    a4 = 0.75 * s * s * math.sin(2.0 * t0) * (3.0 * math.cos(al) ** 2 - 1.0)
    a5 = 0.5 * s * s * math.sin(2.0 * al) * (1.0 - 3.0 * math.cos(2.0 * t0))
    a6 = -s * math.cos(t0) * math.sin(al) ** 2 * (1.0 + (2.0 / 3.0) * s * s)
    return OdeCoefficients(a1, a2, a3, a4, a5, a6)


@dataclass(frozen=True)
class UpstreamTrace:
    """Traces of the uniform upstream state along the cone edge.

    All functions take the azimuth phi (scalar or array) on [-pi, pi].
    The upstream density is normalized to 1 throughout.

    ``a_forcing`` is the tangential-momentum source feeding the layer, with
    its orientation fixed so that it is consistent with the phi-form ODE:
    (4/3) sin(theta0) * a_forcing(phi) == a1 sin(phi) + a2 sin(2 phi).
    With the raw product un*ut that identity comes out with the opposite
    sign; using it flips the recovered azimuthal velocity and breaks the
    radial-momentum balance by an O(1) amount, so the resolved orientation
    is a_forcing = -un*ut (verified numerically in the validation suite).
    """

    theta0: float
    alpha0: float

    def un(self, phi):
        """Upstream velocity component normal to the cone edge (even)."""
        return (
            math.cos(self.alpha0) * math.sin(self.theta0)
            - math.sin(self.alpha0) * math.cos(self.theta0) * np.cos(phi)
        )

    def ut(self, phi):
        """Upstream velocity component along the edge tangent (odd)."""
        return math.sin(self.alpha0) * np.sin(phi)

    def w0(self, phi):
        """Upstream radial velocity component (even)."""
        return (
            math.cos(self.alpha0) * math.cos(self.theta0)
            + math.sin(self.alpha0) * math.sin(self.theta0) * np.cos(phi)
        )

    def a_forcing(self, phi):
        """Tangential-momentum source, orientation-resolved (odd)."""
        return -self.un(phi) * self.ut(phi)

    def a_forcing_derivative(self, phi):
        dun = math.sin(self.alpha0) * math.cos(self.theta0) * np.sin(phi)
        dut = math.sin(self.alpha0) * np.cos(phi)
        return -(dun * self.ut(phi) + self.un(phi) * dut)

    def b_forcing(self, phi):
        """Radial-momentum source w0*un (even)."""
        return self.w0(phi) * self.un(phi)


def ode_residual_pointwise(f, fdot, fddot, phi, coeffs: OdeCoefficients):
    """Left-minus-right side of the layer-energy ODE at one state.

    f*fddot - (2/3)*fdot**2 + (a1 sin phi + a2 sin 2phi)*fdot + a3*f**2
    + (a4 + a5 cos phi + a6 cos 2phi)*f - (3/8)*(a1 sin phi + a2 sin 2phi)**2

    Accepts scalars or broadcastable arrays.
    """
    forcing = coeffs.forcing(phi)
    return (
        f * fddot
        - (2.0 / 3.0) * fdot**2
        + forcing * fdot
        + coeffs.a3 * f**2
        + coeffs.linear_weight(phi) * f
        - 0.375 * forcing**2
    )


def pressure_wc(f_at_phi, phi, config: ProblemConfig):
    """Surface force density W_C at azimuth phi (generalized sine-squared law).

    W_C = un(phi)**2 - f(phi)*cot(theta0) + p0.  The concentrated-layer
    description is physical only where W_C > 0; callers check positivity.
    """
    un = config.trace.un(phi)
    return un**2 - f_at_phi / math.tan(config.theta0) + config.gas.p0


def chaplygin_min_mach(config: ProblemConfig, f_profile, phi_grid=None) -> float:
    """Least upstream Mach number that keeps W_C positive everywhere.

    Returns sup over the grid of (un(phi)**2 - f(phi)*cot(theta0))**(-1/2).
    For alpha0 = 0 and f = 0 this is 1/sin(theta0).

    f_profile : f sampled on phi_grid (defaults to a uniform 2048-point grid)
    """
    f_profile = np.asarray(f_profile, dtype=float)
    if phi_grid is None:
        phi_grid = np.linspace(-math.pi, math.pi, f_profile.size)
    base = config.trace.un(phi_grid) ** 2 - f_profile / math.tan(config.theta0)
    if np.any(base <= 0.0):
        worst = float(np.asarray(phi_grid)[np.argmin(base)])
        raise NonPositiveBaseError(
            f"un(phi)^2 - f(phi)*cot(theta0) <= 0 at phi={worst:.6f}; "
            "no finite Mach number admits a concentrated layer there"
        )
    return float(np.max(base ** -0.5))
