import math

import numpy as np
import pytest

import shocklayer.postprocess as pp
from shocklayer import (
    GasModel,
    IntegrandUnavailableError,
    ProblemConfig,
    SpectralCoefficients,
    compute_h,
    eval_series,
    integrate_trajectory,
    integrate_y,
    recover_fields,
)
from shocklayer.postprocess import _adaptive_simpson, _rhs_y, _rk4_fixed, _windward_start

from conftest import fields_case, solve_case

PI = math.pi


def masked_pair_defect(grid, values, mask, odd):
    """Max |v(-phi) -+ v(phi)| over symmetric valid node pairs."""
    rev_vals, rev_mask = values[::-1], mask[::-1]
    both = mask & rev_mask
    d = values + rev_vals if odd else values - rev_vals
    return float(np.max(np.abs(d[both])))


class TestComputeH:
    def test_zero_incidence_zero_flux(self):
        config = ProblemConfig(theta0=PI / 6, alpha0=0.0, N=6)
        h = compute_h(SpectralCoefficients.zeros(6), config, np.linspace(-PI, PI, 65))
        assert np.all(h == 0.0)

    def test_defining_identity(self, paper_case):
        # 3 h + fdot/sin(theta0) - a_forcing == 0 pointwise
        config, coeffs, _ = paper_case
        grid = np.linspace(-PI, PI, 1025)
        h = compute_h(coeffs, config, grid)
        _, fdot, _ = eval_series(coeffs, grid)
        defect = 3.0 * h + fdot / math.sin(config.theta0) - config.trace.a_forcing(grid)
        assert np.max(np.abs(defect)) <= 1e-12

    def test_odd_in_phi(self, paper_case):
        config, coeffs, _ = paper_case
        grid = np.linspace(0.01, PI - 0.01, 257)
        h_pos = compute_h(coeffs, config, grid)
        h_neg = compute_h(coeffs, config, -grid)
        assert np.max(np.abs(h_pos + h_neg)) <= 1e-8


class TestRk4Core:
    def test_linear_constant_coefficient_order(self):
        # manufactured hook: h/f == c and un == r constant gives the linear
        # ODE ydot = s0*(r - 2 c y) with a closed-form solution
        s0, c, r = 0.5, 1.3, 0.8
        rhs = lambda phi, y: s0 * (r - 2.0 * c * y)
        y0, a, b = 0.1, 0.0, 2.0
        exact = r / (2 * c) + (y0 - r / (2 * c)) * math.exp(-2 * c * s0 * (b - a))
        errs = [abs(_rk4_fixed(rhs, a, y0, b, n) - exact) for n in (8, 16, 32, 64)]
        for e1, e2 in zip(errs, errs[1:]):
            assert 12.0 < e1 / e2 < 20.0  # fourth order halving ratio

    def test_observed_order_on_solved_case(self, paper_case):
        config, coeffs, _ = paper_case
        rhs = _rhs_y(coeffs, config)
        ref = _rk4_fixed(rhs, 2.5, -0.01, 0.5, 8192)
        orders = []
        for n in (128, 256, 512):
            e1 = abs(_rk4_fixed(rhs, 2.5, -0.01, 0.5, n) - ref)
            e2 = abs(_rk4_fixed(rhs, 2.5, -0.01, 0.5, 2 * n) - ref)
            orders.append(math.log2(e1 / e2))
        assert abs(float(np.median(orders)) - 4.0) <= 0.3


class TestIntegrateY:
    def test_zero_incidence_refuses(self):
        config = ProblemConfig(theta0=PI / 6, alpha0=0.0, N=6)
        with pytest.raises(IntegrandUnavailableError):
            integrate_y(SpectralCoefficients.zeros(6), config, np.linspace(-PI, PI, 65))

    def test_odd_profile(self, paper_case):
        config, coeffs, _ = paper_case
        grid = np.linspace(-PI, PI, 2048)
        y = integrate_y(coeffs, config, grid)
        finite = np.isfinite(y)
        scale = np.max(np.abs(y[finite]))
        both = finite & finite[::-1]
        assert np.max(np.abs((y + y[::-1])[both])) <= 1e-8 * scale

    def test_nan_at_singular_nodes_and_leeward_offsets(self, paper_case):
        config, coeffs, _ = paper_case
        grid = np.array([-PI, -1.0, -5e-4, 0.0, 5e-4, 1.0, PI])
        y = integrate_y(coeffs, config, grid)
        assert np.all(np.isnan(y[[0, 2, 3, 4, 6]]))
        assert np.all(np.isfinite(y[[1, 5]]))

    def test_windward_start_tracks_indicial_line(self, paper_case):
        # near the windward end the bounded branch is y ~ A*(phi - pi) with
        # A = s0*un(pi)/(1+gamma); the marched solution must stay on it
        config, coeffs, _ = paper_case
        rhs = _rhs_y(coeffs, config)
        from shocklayer.postprocess import DEFAULT_BASE_STEP, _indicial_exponent

        phi_s, y_s, _ = _windward_start(coeffs, config, PI, 1e-3, rhs, DEFAULT_BASE_STEP)
        gamma = _indicial_exponent(coeffs, config, PI)
        assert gamma > 1.0  # bounded branch is forced at the windward end
        s0 = math.sin(config.theta0)
        A = s0 * float(config.trace.un(PI)) / (1.0 + gamma)
        probe = PI - 0.02
        y_probe = _rk4_fixed(rhs, phi_s, y_s, probe, 4096)
        assert y_probe == pytest.approx(A * (probe - PI), rel=0.1)


class TestRecoverFields:
    def test_closed_form_zero_incidence(self):
        config = ProblemConfig(
            theta0=PI / 6, alpha0=0.0, gas=GasModel.chaplygin(3.0), N=6
        )
        profile = recover_fields(SpectralCoefficients.zeros(6), config)
        assert np.all(profile.ut == 0.0)
        assert np.all(profile.w == math.cos(PI / 6))
        assert np.all(profile.w_rho == 0.5 * math.tan(PI / 6))
        expected_wc = math.sin(PI / 6) ** 2 - 1.0 / 9.0
        assert np.max(np.abs(profile.wc - expected_wc)) == 0.0
        assert np.all(profile.valid_mask)

    def test_product_identities_on_valid_mask(self, paper_fields):
        p = paper_fields
        m = p.valid_mask
        for lhs, rhs in (
            (p.f, p.w_rho * p.ut**2),
            (p.h, p.w_rho * p.ut * p.w),
            (p.y, p.w_rho * p.ut),
        ):
            scale = np.max(np.abs(lhs[m]))
            assert np.max(np.abs((lhs - rhs)[m])) <= 1e-8 * scale

    def test_parity_suite(self, paper_fields):
        p = paper_fields
        m = p.valid_mask
        for values, odd in (
            (p.f, False),
            (p.w, False),
            (p.w_rho, False),
            (p.wc, False),
            (p.fdot, True),
            (p.h, True),
            (p.y, True),
            (p.ut, True),
        ):
            scale = np.max(np.abs(values[m]))
            assert masked_pair_defect(p.phi_grid, values, m, odd) <= 1e-8 * scale

    def test_radial_velocity_positive(self, paper_fields):
        # the resolved forcing orientation must give outward radial flow
        p = paper_fields
        assert np.all(p.w[p.valid_mask] > 0.0)
        assert np.max(np.abs(p.w[p.valid_mask] - math.cos(PI / 6))) < 0.1

    def test_azimuthal_velocity_drifts_leeward(self, paper_fields):
        p = paper_fields
        m = p.valid_mask & (p.phi_grid > 0)
        assert np.all(p.ut[m] < 0.0)
        m = p.valid_mask & (p.phi_grid < 0)
        assert np.all(p.ut[m] > 0.0)

    def test_radial_momentum_balance(self, paper_case, paper_fields):
        # h' - f + 2 h^2/f = w0*un never enters the recovery, so it is an
        # independent check of the forcing orientation; the printed cos(2phi)
        # weight leaves a small even defect, the flipped orientation an O(1) one
        config, coeffs, _ = paper_case
        p = paper_fields
        m = p.valid_mask
        grid = p.phi_grid
        s0 = math.sin(config.theta0)
        _, _, fddot = eval_series(coeffs, grid)
        dh_ds = (config.trace.a_forcing_derivative(grid) - fddot / s0) / (3.0 * s0)
        resid = dh_ds - p.f + 2.0 * p.h**2 / p.f - config.trace.b_forcing(grid)
        assert np.max(np.abs(resid[m])) < 5e-3
        h_flipped = -config.trace.a_forcing(grid) / 3.0 - (p.fdot / s0) / 3.0
        dh_flipped = -config.trace.a_forcing_derivative(grid) / (3.0 * s0) - fddot / (3.0 * s0**2)
        resid_fl = dh_flipped - p.f + 2.0 * h_flipped**2 / p.f - config.trace.b_forcing(grid)
        assert np.max(np.abs(resid_fl[m])) > 0.05

    def test_w_rho_monotone_in_attack_angle(self):
        # more incidence piles mass on the windward side and thins the leeward
        windward, leeward = [], []
        for alpha0 in (PI / 36, PI / 24, PI / 18):
            p = fields_case(PI / 6, alpha0, 8)
            iw = np.argmin(np.abs(p.phi_grid - (PI - 0.2)))
            il = np.argmin(np.abs(p.phi_grid - 0.2))
            windward.append(p.w_rho[iw])
            leeward.append(p.w_rho[il])
        assert windward[0] < windward[1] < windward[2]
        assert leeward[0] > leeward[1] > leeward[2]

    def test_windward_slope_peak_exceeds_leeward(self, paper_fields):
        p = paper_fields
        g = p.phi_grid
        wind = np.abs(p.fdot[(g >= -PI) & (g <= -PI / 2)]).max()
        lee = np.abs(p.fdot[(g >= 0) & (g <= PI / 2)]).max()
        assert wind > lee

    def test_grid_and_mask_shape(self, paper_fields):
        p = paper_fields
        n = p.phi_grid.size
        for arr in (p.f, p.fdot, p.h, p.y, p.ut, p.w, p.w_rho, p.wc, p.valid_mask):
            assert arr.shape == (n,)
        dist = np.minimum.reduce(
            [np.abs(p.phi_grid - q) for q in (-PI, 0.0, PI)]
        )
        assert not np.any(p.valid_mask & (dist < 5e-2))


class TestTrajectory:
    def test_constant_integrand_hook(self, paper_fields, monkeypatch):
        monkeypatch.setattr(pp, "_path_integrand", lambda coeffs, config: (lambda phi: 0.75))
        traj = pp.integrate_trajectory(paper_fields, -2.0, 5.0, -0.5)
        assert np.allclose(traj.r, 5.0 + 0.75 * (traj.phi - (-2.0)), rtol=0, atol=1e-9)

    def test_adaptive_simpson_exactness(self):
        assert _adaptive_simpson(lambda x: 0.3, 0.0, 2.0, 1e-12) == pytest.approx(0.6)
        got = _adaptive_simpson(math.sin, 0.0, PI, 1e-12)
        assert got == pytest.approx(2.0, abs=1e-10)
        # reversed limits flip the sign
        assert _adaptive_simpson(math.sin, PI, 0.0, 1e-12) == pytest.approx(-2.0, abs=1e-10)

    @pytest.mark.parametrize("phi0", [-0.999 * PI, -0.75 * PI, -0.5 * PI])
    def test_monotone_rise_toward_leeward(self, paper_fields, phi0):
        traj = integrate_trajectory(paper_fields, phi0, 10.0)
        assert traj.phi[0] == phi0 and traj.r[0] == 10.0
        assert traj.phi[-1] == pytest.approx(-5e-2)
        assert np.all(np.diff(traj.r) > 0.0)
        assert np.all(np.diff(traj.phi) > 0.0)

    def test_mirror_symmetry(self, paper_fields):
        a = integrate_trajectory(paper_fields, -0.75 * PI, 10.0)
        b = integrate_trajectory(paper_fields, +0.75 * PI, 10.0)
        assert np.allclose(b.phi, -a.phi, rtol=0, atol=1e-14)
        assert np.max(np.abs(b.r - a.r)) <= 1e-6

    def test_independent_quadrature_oracle(self, paper_case, paper_fields):
        # cumulative trapezoid on a dense exact sampling of h/f
        config, coeffs, _ = paper_case
        traj = integrate_trajectory(paper_fields, -0.75 * PI, 10.0)
        dense = np.linspace(-0.75 * PI, traj.phi[-1], 400001)
        f, _, _ = eval_series(coeffs, dense)
        h = compute_h(coeffs, config, dense)
        g = h / f
        r_ref = 10.0 + np.concatenate(
            [[0.0], np.cumsum(0.5 * np.diff(dense) * (g[1:] + g[:-1]))]
        )
        assert abs(traj.r[-1] - r_ref[-1]) < 2e-4
        assert np.max(np.abs(traj.r - np.interp(traj.phi, dense, r_ref))) < 5e-2

    def test_cartesian_on_cone(self, paper_fields):
        traj = integrate_trajectory(paper_fields, -0.5 * PI, 10.0)
        x1, x2, x3 = traj.cartesian()
        # points sit on the cone: sqrt(x2^2+x3^2)/x1 == tan(theta0)
        assert np.allclose(np.hypot(x2, x3) / x1, math.tan(traj.theta0), rtol=1e-12)

    def test_rejects_bad_paths(self, paper_fields):
        with pytest.raises(ValueError):
            integrate_trajectory(paper_fields, -2.0, 0.0)
        with pytest.raises(IntegrandUnavailableError):
            integrate_trajectory(paper_fields, -2.0, 1.0, +2.0)  # crosses phi=0
        with pytest.raises(IntegrandUnavailableError):
            integrate_trajectory(paper_fields, -PI, 1.0)

    def test_zero_incidence_has_no_paths(self):
        config = ProblemConfig(theta0=PI / 6, alpha0=0.0, N=6)
        profile = recover_fields(SpectralCoefficients.zeros(6), config)
        with pytest.raises(IntegrandUnavailableError):
            integrate_trajectory(profile, -2.0, 1.0)
