"""
Nonlinear Fokker-Planck solver: equilibria, mass conservation, free energy and the H-theorem.
"""

from dataclasses import replace

import numpy as np
import pytest

import kinquant as kq
from kinquant.nfpe_solver import check_free_energy_decrease, entropy, quadrature_antiderivative, stable_time_step


def _relaxation(model, t_end=0.5, cadence=10):
    grid = kq.Grid1D(128, 12.0)
    potential = kq.harmonic_potential(grid)
    rho0 = 0.8 * kq.gaussian_packet(grid, center=1.0, width=1.2).density + 0.2 / grid.length
    scenario = kq.NfpeScenario(model, grid, potential, rho0, diffusion=1.0, beta=1.0, t_end=t_end, cadence=cadence)
    rho_eq, _ = kq.equilibrium_density(model, potential, 1.0, grid)
    dt = 0.9 * min(stable_time_step(scenario), stable_time_step(scenario, rho_eq))
    return replace(scenario, dt=dt)


# ---------------------------------------------------------------------------
# Equilibrium
# ---------------------------------------------------------------------------


def test_equilibrium_is_normalized_and_stationary(model, coarse_grid):
    potential = kq.harmonic_potential(coarse_grid)
    rho_eq, beta_prime = kq.equilibrium_density(model, potential, 1.0, coarse_grid)
    assert kq.integrate(rho_eq, coarse_grid) == pytest.approx(1.0, abs=1e-10)
    assert np.all(rho_eq >= 0)
    assert np.isfinite(beta_prime)
    scenario = kq.NfpeScenario(model, coarse_grid, potential, rho_eq, diffusion=1.0)
    assert np.max(np.abs(kq.nfpe_rhs(scenario, rho_eq))) < 1e-8


def test_bg_equilibrium_is_gibbs(coarse_grid):
    potential = kq.harmonic_potential(coarse_grid)
    rho_eq, _ = kq.equilibrium_density(kq.bg(), potential, 2.0, coarse_grid)
    gibbs = np.exp(-2.0 * potential)
    gibbs /= kq.integrate(gibbs, coarse_grid)
    np.testing.assert_allclose(rho_eq, gibbs, atol=1e-12)


def test_tsallis_equilibrium_has_compact_support(coarse_grid):
    potential = kq.harmonic_potential(coarse_grid)
    rho_eq, _ = kq.equilibrium_density(kq.tsallis(2.0), potential, 1.0, coarse_grid)
    assert rho_eq[0] == 0.0 and rho_eq[-1] == 0.0
    assert rho_eq[coarse_grid.n_points // 2] > 0


def _smooth_modulation(grid, rng, n_modes=4):
    # periodic field with max |g| = 1
    phase = 2 * np.pi * (grid.coordinates - grid.coordinates[0]) / grid.length
    g = sum(rng.normal() * np.cos(k * phase + rng.uniform(0, 2 * np.pi)) for k in range(1, n_modes + 1))
    return g / np.max(np.abs(g))


def test_equilibrium_minimizes_free_energy(model, coarse_grid, rng):
    potential = kq.harmonic_potential(coarse_grid)
    rho_eq, _ = kq.equilibrium_density(model, potential, 1.0, coarse_grid)
    f_eq = kq.free_energy(model, rho_eq, potential, 1.0, coarse_grid)
    for _ in range(20):
        g = _smooth_modulation(coarse_grid, rng)
        # rho_eq (1 + eps (g - c)) keeps the mass for this c and stays non-negative for eps < 1/2
        g = g - kq.integrate(rho_eq * g, coarse_grid) / kq.integrate(rho_eq, coarse_grid)
        rho = rho_eq * (1 + rng.uniform(0.05, 0.45) * g)
        assert np.all(rho >= 0)
        assert kq.integrate(rho, coarse_grid) == pytest.approx(kq.integrate(rho_eq, coarse_grid), rel=1e-12)
        assert kq.free_energy(model, rho, potential, 1.0, coarse_grid) > f_eq


# ---------------------------------------------------------------------------
# Dynamics
# ---------------------------------------------------------------------------


def test_rhs_conserves_mass(model):
    scenario = _relaxation(model)
    rate = kq.nfpe_rhs(scenario, scenario.rho0)
    assert abs(kq.integrate(rate, scenario.grid)) < 1e-12


@pytest.mark.parametrize(
    "model",
    [kq.bg(), kq.tsallis(2.0), kq.eip(0.5), kq.eip(-0.5), kq.two_param(0.5, 0.25)],
    ids=["bg", "tsallis", "eip_plus", "eip_minus", "two_param"],
)
def test_h_theorem(model):
    trajectory = kq.evolve_nfpe(_relaxation(model, t_end=0.5, cadence=1), compare_equilibrium=False)
    values = trajectory.table["free_energy"].values
    assert np.all(np.diff(values) <= 1e-10 * np.maximum(np.abs(values[:-1]), 1.0))
    assert values[-1] < values[0]
    np.testing.assert_allclose(trajectory.table["norm"], 1.0, atol=1e-10)


def test_free_energy_increase_is_an_integration_error():
    check_free_energy_decrease(-1.5, -1.5 + 1e-11, step=4)
    with pytest.raises(kq.IntegrationError, match="step 4") as err:
        check_free_energy_decrease(-1.5, -1.5 + 1e-6, step=4, rho=np.ones(3))
    assert err.value.step == 4
    np.testing.assert_array_equal(err.value.state, np.ones(3))


def test_relaxation_stops_when_free_energy_grows(monkeypatch):
    scenario = _relaxation(kq.bg(), t_end=0.1, cadence=5)
    values = iter(np.linspace(0.0, 1.0, 100))
    monkeypatch.setattr("kinquant.nfpe_solver.free_energy", lambda *args, **kwargs: next(values))
    with pytest.raises(kq.IntegrationError, match="H-theorem") as err:
        kq.evolve_nfpe(scenario, compare_equilibrium=False)
    assert err.value.step == 5


def test_relaxation_approaches_equilibrium():
    trajectory = kq.evolve_nfpe(_relaxation(kq.bg(), t_end=4.0))
    l2 = trajectory.table["l2_to_equilibrium"].values
    assert l2[-1] < 0.05 * l2[0]
    assert list(trajectory.table.columns) == [
        "t",
        "norm",
        "free_energy",
        "entropy",
        "mean_potential",
        "l2_to_equilibrium",
        "min_rho",
    ]
    assert trajectory.times[-1] == pytest.approx(4.0)


@pytest.mark.slow
@pytest.mark.parametrize(
    "model", [kq.bg(), kq.tsallis(2.0), kq.kaniadakis(0.5), kq.eip(0.5)], ids=["bg", "tsallis", "kaniadakis", "eip"]
)
def test_long_relaxation_reaches_equilibrium(model):
    trajectory = kq.evolve_nfpe(_relaxation(model, t_end=8.0))
    assert trajectory.table["l2_to_equilibrium"].iloc[-1] < 1e-3


def test_time_step_above_bound_is_rejected():
    scenario = _relaxation(kq.bg())
    with pytest.raises(kq.ConfigurationError, match="stability bound"):
        kq.evolve_nfpe(replace(scenario, dt=10 * scenario.dt))


def test_unnormalized_initial_density_is_rejected(coarse_grid):
    with pytest.raises(kq.ConfigurationError, match="normalized"):
        kq.NfpeScenario(kq.bg(), coarse_grid, np.zeros(coarse_grid.shape), np.full(coarse_grid.shape, 1.0))


def test_zero_diffusion_is_rejected(coarse_grid):
    rho0 = np.full(coarse_grid.shape, 1.0 / coarse_grid.length)
    with pytest.raises(kq.ConfigurationError):
        kq.NfpeScenario(kq.bg(), coarse_grid, np.zeros(coarse_grid.shape), rho0, diffusion=0.0)


# ---------------------------------------------------------------------------
# Free energy and currents
# ---------------------------------------------------------------------------


@pytest.mark.parametrize(
    "model",
    [kq.bg(), kq.tsallis(2.0), kq.eip(0.5), kq.two_param(0.5, 0.25)],
    ids=["bg", "tsallis", "eip", "two_param"],
)
def test_free_energy_closed_form_matches_quadrature(model):
    scenario = _relaxation(model)
    args = (model, scenario.rho0, scenario.potential, 1.0, scenario.grid)
    closed = kq.free_energy(*args, method="closed_form")
    numeric = kq.free_energy(*args, method="quadrature")
    assert abs(closed - numeric) < 1e-8 * max(1.0, abs(closed))


def test_quadrature_antiderivative_bg():
    rho = np.array([0.0, 0.5, 1.0, 2.0])
    expected = np.where(rho > 0, rho * np.log(np.where(rho > 0, rho, 1.0)), 0.0)
    np.testing.assert_allclose(quadrature_antiderivative(kq.bg(), rho), expected, atol=1e-10)


def test_free_energy_unknown_method(coarse_grid):
    rho = np.full(coarse_grid.shape, 1.0 / coarse_grid.length)
    with pytest.raises(kq.ConfigurationError):
        kq.free_energy(kq.bg(), rho, np.zeros(coarse_grid.shape), 1.0, coarse_grid, method="simpson")


def test_uniform_bg_entropy(coarse_grid):
    rho = np.full(coarse_grid.shape, 1.0 / coarse_grid.length)
    assert entropy(kq.bg(), rho, coarse_grid) == pytest.approx(np.log(coarse_grid.length))


def test_drift_shift_current(model):
    scenario = _relaxation(model)
    direct, shifted = kq.drift_shift_current(
        model, scenario.rho0, scenario.potential, 0.7, 1.0, scenario.grid
    )
    np.testing.assert_allclose(direct, shifted, rtol=1e-10, atol=1e-12)
