import math

import numpy as np
import pytest

from shocklayer import (
    NewtonConfig,
    ProblemConfig,
    compute_coefficients,
    continuation_solve,
    default_continuation_steps,
    recover_fields,
)

# cache solves across the whole session; continuation is deterministic
_SOLVES = {}
_PROFILES = {}


def solve_case(theta0, alpha0, N, steps=None):
    key = (theta0, alpha0, N, steps)
    if key not in _SOLVES:
        config = ProblemConfig(theta0=theta0, alpha0=alpha0, N=N)
        coeffs, reports = continuation_solve(
            config, steps or default_continuation_steps(alpha0), NewtonConfig()
        )
        _SOLVES[key] = (config, coeffs, reports)
    return _SOLVES[key]


def fields_case(theta0, alpha0, N, grid_n=2048):
    key = (theta0, alpha0, N, grid_n)
    if key not in _PROFILES:
        config, coeffs, _ = solve_case(theta0, alpha0, N)
        _PROFILES[key] = recover_fields(coeffs, config, np.linspace(-math.pi, math.pi, grid_n))
    return _PROFILES[key]


@pytest.fixture(scope="session")
def paper_case():
    """Reference configuration theta0=pi/6, alpha0=pi/36, N=8."""
    return solve_case(math.pi / 6, math.pi / 36, 8)


@pytest.fixture(scope="session")
def paper_fields(paper_case):
    config, coeffs, _ = paper_case
    return recover_fields(coeffs, config)


@pytest.fixture(scope="session")
def paper_ode(paper_case):
    return compute_coefficients(paper_case[0])
