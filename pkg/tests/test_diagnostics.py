"""
Run diagnostics: time derivatives, Ehrenfest relations, 2D static checks, dispersion and stationary states.
"""

import numpy as np
import pytest

import kinquant as kq
from kinquant.acceptance import random_smooth_field
from kinquant.diagnostics import predicted_frequency, records_from_table, time_derivative
from kinquant.nse_solver import space_tanh_diffusion, time_sine_diffusion

from conftest import packet_scenario


# ---------------------------------------------------------------------------
# Time derivative
# ---------------------------------------------------------------------------


def test_time_derivative_uniform():
    t = np.linspace(0.0, 1.0, 101)
    derivative = time_derivative(t, np.sin(3 * t))
    assert np.max(np.abs(derivative[2:-2] - 3 * np.cos(3 * t[2:-2]))) < 2e-7
    assert np.max(np.abs(derivative - 3 * np.cos(3 * t))) < 2e-3


def test_time_derivative_nonuniform_is_exact_for_quadratics():
    t = np.array([0.0, 0.1, 0.25, 0.3, 0.6, 1.0])
    np.testing.assert_allclose(time_derivative(t, t ** 2), 2 * t, atol=1e-12)


def test_time_derivative_needs_three_samples():
    with pytest.raises(kq.UsageError):
        time_derivative(np.array([0.0, 1.0]), np.array([0.0, 1.0]))


# ---------------------------------------------------------------------------
# Ehrenfest relations
# ---------------------------------------------------------------------------


def test_ehrenfest_nonlinear_drift(grid):
    scenario = packet_scenario(kq.eip(0.5, "nonlinear_drift"), grid, dt=1e-3, t_end=0.2)
    residuals = kq.ehrenfest_residuals(kq.evolve_nse(scenario), scenario)
    assert np.max(np.abs(residuals["residual_r1"])) < 1e-4
    # with V = 0 momentum and energy are constant
    assert np.max(np.abs(residuals["residual_r2"])) < 1e-5
    assert np.max(residuals["relative_r4"]) < 1e-5


def _drift_gap(grid, kappa_e):
    scenario = packet_scenario(kq.eip(kappa_e, "nonlinear_drift"), grid, dt=1e-3, t_end=0.1)
    residuals = kq.ehrenfest_residuals(kq.evolve_nse(scenario), scenario)
    return np.max(np.abs(residuals["velocity_mean"] - residuals["momentum_over_mass"]))


def test_nonlinear_drift_separates_velocity_from_momentum(grid):
    # d<x>/dt - <p>/m = kappa_e <rho u>, so the gap is nonzero and linear in kappa_e
    gaps = np.array([_drift_gap(grid, kappa_e) for kappa_e in (0.1, 0.2, 0.4)])
    assert gaps.min() > 1e-3
    np.testing.assert_allclose(gaps / np.array([0.1, 0.2, 0.4]), gaps[0] / 0.1, rtol=0.05)


def test_ehrenfest_harmonic_trap(grid):
    scenario = packet_scenario(
        kq.bg(), grid, potential=kq.harmonic_potential(grid), center=1.0, dt=1e-3, t_end=0.2
    )
    residuals = kq.ehrenfest_residuals(kq.evolve_nse(scenario), scenario)
    assert np.max(np.abs(residuals["residual_r2"])) < 5e-5
    # for linear drift d<x>/dt = <p> / m
    np.testing.assert_allclose(residuals["velocity_mean"], residuals["momentum_over_mass"], atol=1e-10)


def test_ehrenfest_needs_three_records(grid):
    scenario = packet_scenario(kq.bg(), grid, dt=1e-3, t_end=0.002, cadence=10)
    with pytest.raises(kq.UsageError):
        kq.ehrenfest_residuals(kq.evolve_nse(scenario), scenario)


def test_variable_diffusion_constant_profile(grid):
    scenario = packet_scenario(kq.bg(), grid, diffusion=0.05, dt=1e-3, t_end=0.2)
    residuals = kq.variable_D_residuals(kq.evolve_nse(scenario), scenario)
    assert np.max(np.abs(residuals["residual_x"])) < 1e-4
    np.testing.assert_allclose(residuals["p_predicted"], 0.0, atol=1e-14)
    np.testing.assert_allclose(residuals["e_predicted"], 0.0, atol=1e-14)


def test_variable_diffusion_in_time(grid):
    diffusion = time_sine_diffusion(0.05, 0.1)
    scenario = packet_scenario(kq.bg(), grid, diffusion=diffusion, chirp=0.2, dt=1e-3, t_end=0.3)
    residuals = kq.variable_D_residuals(kq.evolve_nse(scenario), scenario)
    assert residuals["relative_e"].max() < 1e-3


def test_variable_diffusion_in_space(grid):
    scenario = packet_scenario(kq.bg(), grid, diffusion=space_tanh_diffusion(0.05, 0.1), dt=1e-3, t_end=0.3)
    residuals = kq.variable_D_residuals(kq.evolve_nse(scenario), scenario)
    assert residuals["relative_p"].max() < 5e-3


def test_records_from_table(grid):
    scenario = packet_scenario(kq.bg(), grid, dt=1e-3, t_end=0.1)
    trajectory = kq.evolve_nse(scenario)
    residuals = kq.ehrenfest_residuals(trajectory, scenario)
    records = records_from_table(trajectory.table, residuals)
    assert len(records) == len(trajectory.table)
    assert all(record.is_valid for record in records)
    assert np.isnan(records[0].residual_r1)
    assert np.isfinite(records[5].residual_r1)
    assert records[0].to_dict()["norm"] == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Static 2D checks
# ---------------------------------------------------------------------------


@pytest.fixture
def grid_2d():
    return kq.Grid2D(64, 64, 2 * np.pi, 2 * np.pi)


def test_eip_vorticity_matches_general_form(grid_2d, rng):
    for _ in range(3):
        rho = random_smooth_field(grid_2d, rng)
        sigma = random_smooth_field(grid_2d, rng, offset=0.0)
        general = kq.vorticity_2d(rho, sigma, kq.eip(0.7, "nonlinear_drift"), grid_2d)
        np.testing.assert_allclose(general, kq.eip_vorticity_2d(rho, sigma, 0.7, grid_2d), atol=1e-10)
        assert np.max(np.abs(kq.vorticity_2d(rho, sigma, kq.bg(), grid_2d))) < 1e-12


def test_eip_vorticity_closed_form(grid_2d):
    x, y = grid_2d.coordinates
    rho = 1 + 0.1 * np.cos(x)
    sigma = np.sin(y)
    expected = 0.5 * (-0.1 * np.sin(x) * np.cos(y))
    np.testing.assert_allclose(kq.eip_vorticity_2d(rho, sigma, 0.5, grid_2d), expected, atol=1e-6)


def test_angular_momentum(grid_2d):
    x, y = grid_2d.coordinates
    rho = np.exp(-((x - 1) ** 2 + y ** 2) / (2 * 0.5 ** 2))
    rho /= kq.integrate(rho, grid_2d)
    # <x> <cos y> for a separable density
    assert kq.angular_momentum_2d(rho, np.sin(y), grid_2d) == pytest.approx(np.exp(-0.125), rel=1e-4)


def test_gauge_condition(grid_2d):
    x, y = grid_2d.coordinates
    rho = 1 + 0.5 * np.sin(y) * np.cos(x)
    assert kq.gauge_condition_2d(0.1, rho, kq.bg(), grid_2d)
    assert not kq.gauge_condition_2d(1 + 0.5 * np.sin(x), 1 + 0.5 * np.sin(y), kq.bg(), grid_2d)


def test_2d_diagnostics_need_2d_fields(grid, grid_2d):
    with pytest.raises(kq.UsageError):
        kq.vorticity_2d(np.ones(grid.shape), np.ones(grid.shape), kq.bg(), grid)
    with pytest.raises(kq.UsageError):
        kq.eip_vorticity_2d(np.ones((8, 8)), np.ones((8, 8)), 0.5, grid_2d)


# ---------------------------------------------------------------------------
# Dispersion and stationary states
# ---------------------------------------------------------------------------


def test_predicted_frequency():
    assert predicted_frequency(kq.bg(), 0.5, 2.0) == pytest.approx(2.0)
    assert predicted_frequency(kq.eip(0.5, "nonlinear_drift"), 1.0, 2.0) == pytest.approx(4.0)


@pytest.mark.parametrize("model", [kq.bg(), kq.eip(0.5, "nonlinear_drift")], ids=["bg", "eip_nonlinear"])
def test_dispersion(grid, model):
    measured, predicted = kq.dispersion_check(model, 0.5, grid.wavenumber(2), grid, dt=1e-3, t_end=0.2)
    assert measured == pytest.approx(predicted, rel=1e-3)


def test_dispersion_table(grid):
    rows = [(0.5, grid.wavenumber(1)), (0.5, grid.wavenumber(2))]
    table = kq.dispersion_table(kq.bg(), rows, grid, dt=1e-3, t_end=0.1)
    assert list(table.columns) == ["k", "amplitude", "omega_measured", "omega_predicted", "relative_error"]
    assert table["relative_error"].max() < 1e-3


@pytest.mark.parametrize("model", [kq.bg(), kq.tsallis(1.5), kq.eip(0.5)], ids=["bg", "tsallis", "eip"])
def test_stationary_state(grid, model):
    sigma_s = 0.05 * np.cos(2 * np.pi * grid.coordinates / grid.length)
    rho_s, residual = kq.stationary_residual(model, sigma_s, 0.1, 0.0, grid)
    assert np.all(rho_s > 0)
    assert residual < 1e-7


def test_stationary_state_needs_diffusion(grid):
    with pytest.raises(kq.UsageError):
        kq.stationary_residual(kq.bg(), np.zeros(grid.shape), 0.0, 0.0, grid)
