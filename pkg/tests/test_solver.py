import math

import numpy as np
import pytest

from shocklayer import (
    NewtonConfig,
    NoConvergenceError,
    ProblemConfig,
    SingularJacobianError,
    SpectralCoefficients,
    compute_coefficients,
    continuation_solve,
    eval_series,
    newton_solve,
    residual_function,
)
from shocklayer.solver import ContinuationError, _newton_raw

from conftest import solve_case

PI = math.pi


class TestNewtonCore:
    def test_affine_map_converges_in_one_iteration(self):
        # Newton is exact on affine maps: x1 = x0 - A^-1 (A x0 + c)
        rng = np.random.default_rng(5)
        A = rng.uniform(-1, 1, (6, 6)) + 4.0 * np.eye(6)
        c = rng.uniform(-1, 1, 6)
        for _ in range(5):
            x0 = rng.uniform(-10, 10, 6)
            x, report = _newton_raw(lambda x: A @ x + c, lambda x: A, x0, NewtonConfig())
            assert report.converged and report.iterations <= 2
            assert np.max(np.abs(A @ x + c)) <= 1e-10

    def test_singular_jacobian_detected(self):
        A = np.zeros((3, 3))
        A[0, 0] = 1.0  # rank 1
        with pytest.raises(SingularJacobianError) as exc:
            _newton_raw(lambda x: A @ x, lambda x: A, np.ones(3), NewtonConfig())
        assert exc.value.iteration == 1

    def test_no_convergence_reported(self):
        # gradient step of a quartic bowl with heavy damping stalls
        cfg = NewtonConfig(max_iterations=3, tolerance=1e-16, damping_factor=0.1)
        with pytest.raises(NoConvergenceError) as exc:
            _newton_raw(
                lambda x: x**3 + x,
                lambda x: np.diag(3 * x**2 + 1),
                np.full(2, 10.0),
                cfg,
            )
        assert exc.value.iterations == 3

    def test_config_validation(self):
        with pytest.raises(ValueError):
            NewtonConfig(max_iterations=0)
        with pytest.raises(ValueError):
            NewtonConfig(tolerance=0.0)
        with pytest.raises(ValueError):
            NewtonConfig(damping_factor=1.5)
        with pytest.raises(ValueError):
            NewtonConfig(norm_kind="l1")

    def test_euclidean_norm_option(self):
        cfg = NewtonConfig(norm_kind="euclidean")
        assert cfg.step_norm(np.array([3.0, 4.0])) == pytest.approx(5.0)
        assert NewtonConfig().step_norm(np.array([3.0, -4.0])) == pytest.approx(4.0)


class TestNewtonSolve:
    def test_paper_case_converges_to_small_residual(self, paper_case, paper_ode):
        config, coeffs, reports = paper_case
        grid = np.linspace(-PI, PI, 2048, endpoint=False)
        resid = residual_function(coeffs, paper_ode, grid)
        assert np.max(np.abs(resid)) < 2e-7
        assert all(r.converged for r in reports)
        assert reports[-1].final_step_norm < 1e-12

    def test_quadratic_convergence_history(self):
        # from the zero start the step norms shrink superlinearly
        config = ProblemConfig(theta0=PI / 6, alpha0=PI / 36, N=8)
        ode = compute_coefficients(config)
        _, report = newton_solve(SpectralCoefficients.zeros(8), ode, NewtonConfig())
        h = [s for s in report.history if s > 0]
        assert len(h) >= 3
        for a, b in zip(h[-3:-1], h[-2:]):
            assert b < a * a**0.5  # much faster than linear decay

    def test_n_profiles_coincide(self):
        # different truncations give the same curve within plotting accuracy
        grid = np.linspace(-PI, PI, 512)
        _, c5, _ = solve_case(PI / 6, PI / 36, 5)
        f5, fd5, _ = eval_series(c5, grid)
        for N in range(6, 11):
            _, cN, _ = solve_case(PI / 6, PI / 36, N)
            fN, fdN, _ = eval_series(cN, grid)
            assert np.max(np.abs(fN - f5)) < 1e-6
            assert np.max(np.abs(fdN - fd5)) < 1e-6

    def test_determinism(self):
        config = ProblemConfig(theta0=PI / 6, alpha0=PI / 36, N=7)
        ode = compute_coefficients(config)
        a, ra = newton_solve(SpectralCoefficients.zeros(7), ode)
        b, rb = newton_solve(SpectralCoefficients.zeros(7), ode)
        assert np.array_equal(a.b, b.b)
        assert ra.history == rb.history


class TestContinuation:
    def test_zero_incidence_stays_at_zero(self):
        config = ProblemConfig(theta0=PI / 6, alpha0=0.0, N=6)
        coeffs, reports = continuation_solve(config, 3)
        assert np.all(coeffs.b == 0.0)
        assert all(r.converged for r in reports)
        assert reports[0].iterations == 1  # zero step accepted immediately

    def test_moderate_incidence_profile_shape(self):
        # the boundary ringing of the truncation decays slowly for larger
        # attack angles (the endpoint smoothness exponent ~3 sin t0 cos t0 /
        # alpha0 drops), so the nonnegativity floor needs a resolved series;
        # at N=8 this same case dips to -1.3e-6
        config = ProblemConfig(theta0=PI / 6, alpha0=PI / 9, N=64)
        coeffs, _ = continuation_solve(config, 4)
        grid = np.linspace(-PI, PI, 2048)
        f = eval_series(coeffs, grid)[0]
        fmax = f.max()
        assert f.min() >= -1e-9
        assert abs(eval_series(coeffs, 0.0)[0]) <= 1e-3 * fmax
        assert abs(eval_series(coeffs, PI)[0]) <= 1e-3 * fmax

    def test_large_incidence_converges_but_invalid(self):
        from shocklayer import solution_shape_metrics

        for N in (5, 10):
            config = ProblemConfig(theta0=PI / 6, alpha0=PI / 6, N=N)
            coeffs, reports = continuation_solve(config, 6)
            assert all(r.converged for r in reports)
            shape = solution_shape_metrics(coeffs, config)
            assert not (shape["f_nonnegative"] and shape["wc_positive"])

    def test_mirror_symmetry_in_attack_angle(self):
        # f(-alpha0) is f(alpha0) reflected through phi -> pi - phi,
        # i.e. b_n -> (-1)^n b_n
        _, plus, _ = solve_case(PI / 6, PI / 36, 8)
        config = ProblemConfig(theta0=PI / 6, alpha0=-PI / 36, N=8)
        minus, _ = continuation_solve(config, 1)
        signs = (-1.0) ** np.arange(9)
        assert np.max(np.abs(minus.b - signs * plus.b)) <= 1e-8
        grid = np.linspace(-PI, PI, 257)
        f_minus = eval_series(minus, grid)[0]
        f_plus_reflected = eval_series(plus, PI - grid)[0]
        assert np.max(np.abs(f_minus - f_plus_reflected)) <= 1e-8

    def test_invalid_step_count(self):
        config = ProblemConfig(theta0=PI / 6, alpha0=PI / 36, N=6)
        with pytest.raises(ValueError):
            continuation_solve(config, 0)

    def test_failure_annotated_with_stage(self):
        config = ProblemConfig(theta0=PI / 6, alpha0=PI / 9, N=6)
        cfg = NewtonConfig(max_iterations=1, tolerance=1e-15)
        with pytest.raises(ContinuationError) as exc:
            continuation_solve(config, 2, cfg)
        assert exc.value.stage in (1, 2)
        assert 0.0 < exc.value.alpha_k <= PI / 9 + 1e-15
