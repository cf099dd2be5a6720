#!/usr/bin/env python3
"""Particle paths on the cone surface.

A particle at azimuth phi and radius r moves with dphi/dt = u^t and
dr/dt = w, so r(phi) = r0 + integral of w/u^t.  Since u^t points toward the
leeward generatrix on both halves, every path spirals toward phi = 0 with
growing radius.
"""

import math

import numpy as np

from shocklayer import ProblemConfig, continuation_solve, integrate_trajectory, recover_fields

config = ProblemConfig(theta0=math.pi / 6, alpha0=math.pi / 36, N=8)
coeffs, _ = continuation_solve(config)
profile = recover_fields(coeffs, config)

print("theta0 = pi/6, alpha0 = pi/36, starts on the windward half, r0 = 10\n")
for phi0 in (-0.999 * math.pi, -0.75 * math.pi, -0.5 * math.pi):
    traj = integrate_trajectory(profile, phi0, 10.0)
    quarter = traj.r[traj.phi.size // 4]
    print(f"phi0 = {phi0:+.4f}: r = 10.0 "
          f"-> {quarter:8.2f} (quarter way) -> {traj.r[-1]:8.2f} at phi = {traj.phi[-1]:+.3f}, "
          f"monotone climb: {bool(np.all(np.diff(traj.r) > 0))}")

print("\nmirror-image starts on the eastern half give the mirror paths:")
west = integrate_trajectory(profile, -0.75 * math.pi, 10.0)
east = integrate_trajectory(profile, +0.75 * math.pi, 10.0)
print(f"max |r_east(-phi) - r_west(phi)| = {np.max(np.abs(east.r - west.r)):.2e}")

x1, x2, x3 = west.cartesian()
print(f"\nCartesian check: paths stay on the cone, "
      f"max |hypot(x2,x3)/x1 - tan(theta0)| = "
      f"{np.max(np.abs(np.hypot(x2, x3) / x1 - math.tan(config.theta0))):.2e}")
