"""
Nonlinear gauge transformation and the linearization of the BG Doebner-Goldin member.
"""

import numpy as np
import pytest

import kinquant as kq
from kinquant.gauge import current_mismatch, make_gauge_pair, potential_difference, transformed_phase
from kinquant.grid_fields import HydroPair
from kinquant.nse_solver import time_sine_diffusion

from conftest import packet_scenario

MODELS = [kq.bg(), kq.tsallis(1.5), kq.eip(0.5), kq.eip(0.5, "nonlinear_drift")]
MODEL_IDS = ["bg", "tsallis", "eip", "eip_nonlinear"]


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_transformation_keeps_density(grid, model):
    psi = kq.gaussian_packet(grid, boost=1.0)
    phi = kq.gauge_forward(psi, model, 0.05)
    np.testing.assert_allclose(phi.density, psi.density, rtol=1e-13, atol=1e-300)
    np.testing.assert_allclose(kq.gauge_inverse(phi, model, 0.05).values, psi.values, atol=1e-13)


def test_phase_shift_is_m_d_ln_kappa(grid):
    pair = make_gauge_pair(kq.gaussian_packet(grid, boost=1.0), kq.bg(), 0.05)
    original = kq.polar_decompose(pair.original)
    shifted = transformed_phase(original, kq.bg(), 0.05)
    np.testing.assert_allclose(original.sigma_phase - shifted.sigma_phase, pair.sigma_shift, atol=1e-12)


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_current_is_preserved(grid, model):
    hydro = kq.polar_decompose(kq.gaussian_packet(grid, boost=1.0))
    assert current_mismatch(model, 0.05, hydro) < 1e-10


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_transformed_energy_equals_original(grid, model):
    scenario = packet_scenario(model, grid, diffusion=0.05)
    phi0 = kq.gauge_forward(scenario.psi0, model, 0.05)
    original = kq.hamiltonian_energy(scenario, scenario.psi0)
    assert kq.transformed_energy(scenario, phi0) == pytest.approx(original, rel=1e-5)


def test_dropping_potential_difference(grid):
    model = kq.tsallis(1.5)
    hydro = kq.polar_decompose(kq.gaussian_packet(grid, boost=1.0))
    kept, _ = kq.transformed_nonlinearities(model, 0.1, hydro)
    dropped, _ = kq.transformed_nonlinearities(model, 0.1, hydro, drop_potential_difference=True)
    rho = hydro.rho
    grad = kq.spatial_derivative(rho, grid)
    bracket = 0.01 * (kq.f1(model, rho) * kq.spatial_derivative(rho, grid, 2) + kq.f2(model, rho) * grad ** 2)
    np.testing.assert_allclose(kept - dropped, bracket, atol=1e-14)


def test_bg_transformed_nonlinearity_is_bohm_like(grid):
    # f1 = 1 / rho and f2 = -1 / (2 rho^2) for BG, so W~ = 2 m D^2 (sqrt rho)'' / sqrt rho
    hydro = kq.polar_decompose(kq.gaussian_packet(grid, boost=1.0))
    real, imaginary = kq.transformed_nonlinearities(kq.bg(), 0.1, hydro)
    amplitude = np.sqrt(hydro.rho)
    expected = 2 * 0.01 * kq.spatial_derivative(amplitude, grid, 2) / amplitude
    core = np.abs(grid.coordinates) < 2.5
    np.testing.assert_allclose(real[core], expected[core], atol=5e-6)
    assert np.all(imaginary == 0)


def test_eip_transformed_drift_prefactor(grid):
    # without diffusion W~ = (m/2)(gamma' - 1) u^2 = m k rho u^2 and Wcal~ = -(hbar / 2 rho)(k rho^2 u)'
    model = kq.eip(0.5, "nonlinear_drift")
    hydro = kq.polar_decompose(kq.gaussian_packet(grid, boost=1.0, chirp=0.1))
    real, imaginary = kq.transformed_nonlinearities(model, 0.0, hydro)
    rho, u = hydro.rho, 1.0 + 0.2 * grid.coordinates
    core = np.abs(grid.coordinates) < 4
    np.testing.assert_allclose(real[core], (0.5 * rho * u ** 2)[core], atol=1e-10)
    expected = -kq.spatial_derivative(0.5 * rho ** 2 * u, grid) / (2 * rho)
    np.testing.assert_allclose(imaginary[core], expected[core], atol=1e-6)


# ---------------------------------------------------------------------------
# Transformed potentials
# ---------------------------------------------------------------------------


@pytest.mark.parametrize("model", MODELS, ids=MODEL_IDS)
def test_transformed_potentials_make_up_the_energy(grid, model):
    scenario = packet_scenario(model, grid, diffusion=0.05, g_coeffs=(0.0, 0.5))
    phi = kq.gauge_forward(scenario.psi0, model, 0.05)
    hydro = kq.polar_decompose(phi)
    u_hat, u_hat_1 = kq.transformed_potentials(scenario, hydro)
    np.testing.assert_allclose(
        u_hat - u_hat_1, potential_difference(model, hydro.rho, 0.05, grid), atol=1e-15
    )
    kinetic = 0.5 * np.abs(kq.spatial_derivative(phi.values, grid)) ** 2
    for potential, drop in [(u_hat, False), (u_hat_1, True)]:
        assert kq.transformed_energy(scenario, phi, drop) == pytest.approx(
            kq.integrate(kinetic + potential, grid), rel=1e-5
        )


@pytest.mark.parametrize("model", [kq.bg(), kq.eip(0.5)], ids=["bg", "eip"])
def test_transformed_nonlinearity_is_the_variation_of_the_potential(grid, model):
    # d/de of the integral of U^(rho + e eta) equals the integral of W~ eta for linear drift
    scenario = packet_scenario(model, grid, diffusion=0.1)
    hydro = kq.polar_decompose(scenario.psi0)
    eta = hydro.rho * np.cos(0.5 * grid.coordinates)
    eps = 1e-4

    def total(rho):
        shifted = HydroPair(grid, rho, hydro.sigma_phase, hydro.hbar, hydro.mass)
        return kq.integrate(kq.transformed_potentials(scenario, shifted)[0], grid)

    variation = (total(hydro.rho + eps * eta) - total(hydro.rho - eps * eta)) / (2 * eps)
    real, _ = kq.transformed_nonlinearities(model, 0.1, hydro)
    assert variation == pytest.approx(kq.integrate(real * eta, grid), rel=1e-3)


def test_linear_drift_has_no_imaginary_part(grid):
    hydro = kq.polar_decompose(kq.gaussian_packet(grid, boost=1.0))
    _, imaginary = kq.transformed_nonlinearities(kq.eip(0.5), 0.1, hydro)
    assert np.all(imaginary == 0)


def test_paired_evolution_keeps_densities_together(grid):
    scenario = packet_scenario(kq.eip(0.5), grid, diffusion=0.05, dt=1e-3, t_end=0.1)
    psi_run, phi_run, report = kq.paired_evolution(scenario)
    assert list(report.columns) == [
        "t",
        "max_density_discrepancy",
        "l2_density_discrepancy",
        "energy_psi",
        "energy_phi",
    ]
    assert report["max_density_discrepancy"].max() < 1e-5
    np.testing.assert_allclose(report["energy_phi"], report["energy_psi"], rtol=1e-5)
    assert len(psi_run.times) == len(phi_run.times) == len(report)


def test_variable_diffusion_is_not_gauged(grid):
    with pytest.raises(kq.UsageError):
        kq.gauge_forward(kq.gaussian_packet(grid), kq.bg(), time_sine_diffusion(0.05, 0.1))


# ---------------------------------------------------------------------------
# Linearization
# ---------------------------------------------------------------------------


def test_kbar():
    assert kq.dg_kbar(0.3) == pytest.approx(0.8)
    assert kq.dg_kbar(0.0, hbar=2.0) == pytest.approx(2.0)
    with pytest.raises(kq.ConfigurationError):
        kq.dg_kbar(0.6)


def test_linearization_round_trip(grid):
    phi = kq.gauge_forward(kq.gaussian_packet(grid, boost=1.0), kq.bg(), 0.3)
    chi = kq.dg_linearize(phi, 0.3, kq.bg())
    assert chi.hbar == pytest.approx(0.8)
    np.testing.assert_allclose(chi.density, phi.density, rtol=1e-12, atol=1e-300)
    back = kq.dg_delinearize(chi, 1.0, kq.bg())
    np.testing.assert_allclose(back.values, phi.values, atol=1e-12)


def test_linearization_needs_bg(grid):
    phi = kq.gaussian_packet(grid)
    with pytest.raises(kq.ConfigurationError):
        kq.dg_linearize(phi, 0.3, kq.eip(0.5))


@pytest.mark.slow
def test_dg_chain():
    scenario = packet_scenario(kq.bg(), kq.Grid1D(256, 40.0), diffusion=0.3, dt=2e-3, t_end=0.5)
    report = kq.dg_chain(scenario)
    assert report["l2_original_vs_transformed"].max() < 1e-4
    assert report["l2_original_vs_linear"].iloc[-1] < 1e-3
