import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Sequence, Tuple

import numpy as np
import pandas as pd
from numpy.polynomial import Polynomial

from .config import HBAR, MASS
from .entropy_catalog import (
    EntropyModel,
    d_gamma,
    f1,
    f2,
    gamma_drift,
    ln_kappa,
)
from .exceptions import ConfigurationError, UsageError
from .grid_fields import (
    ComplexWavefunction,
    HydroPair,
    integrate,
    l2_distance,
    polar_decompose,
    spatial_derivative,
)
from .nse_solver import (
    NseScenario,
    NseTrajectory,
    VariableDiffusion,
    check_scenario,
    drift_velocity,
    evolve_nse,
    integrate_wavefunction,
    linear_schrodinger_rhs,
)

logger = logging.getLogger(__name__)


def _constant_diffusion(diffusion) -> float:
    if isinstance(diffusion, VariableDiffusion):
        raise UsageError("The gauge transformation is implemented for a constant diffusion coefficient only")
    return float(diffusion)


def phase_shift(model: EntropyModel, rho: np.ndarray, diffusion: float, mass: float = MASS) -> np.ndarray:
    """m D ln kappa(rho), the amount removed from the phase by the gauge transformation."""
    return mass * diffusion * ln_kappa(model, rho)


def gauge_forward(psi: ComplexWavefunction, model: EntropyModel, diffusion: float) -> ComplexWavefunction:
    """
    Nonlinear gauge transformation phi = psi exp(-(i / hbar) m D ln kappa(rho)).

    The modulus is untouched; the phase becomes sigma = Sigma - m D ln kappa(rho).

    Args:
        psi: Node-free wavefunction
        model: Entropy catalog entry
        diffusion: Constant diffusion coefficient D

    Returns:
        phi on the same grid

    Raises:
        DecompositionError: if psi has a node inside its support

    Example:
        >>> grid = Grid1D(256, 20.0)
        >>> psi = gaussian_packet(grid)
        >>> np.allclose(gauge_forward(psi, bg(), 0.0).values, psi.values)
        True
    """
    diffusion = _constant_diffusion(diffusion)
    polar_decompose(psi, model.rho_floor)
    shift = phase_shift(model, psi.density, diffusion, psi.mass)
    return psi.with_values(psi.values * np.exp(-1j * shift / psi.hbar))


def gauge_inverse(phi: ComplexWavefunction, model: EntropyModel, diffusion: float) -> ComplexWavefunction:
    """Inverse of gauge_forward, psi = phi exp((i / hbar) m D ln kappa(rho))."""
    diffusion = _constant_diffusion(diffusion)
    shift = phase_shift(model, phi.density, diffusion, phi.mass)
    return phi.with_values(phi.values * np.exp(1j * shift / phi.hbar))


@dataclass
class GaugePair:
    """
    A wavefunction and its gauge-transformed partner.

    Args:
        original: psi, phase Sigma
        transformed: phi, phase sigma
        model: Entropy catalog entry
        diffusion: Constant diffusion coefficient D
    """

    original: ComplexWavefunction
    transformed: ComplexWavefunction
    model: EntropyModel
    diffusion: float

    def __post_init__(self):
        gap = float(np.max(np.abs(self.original.density - self.transformed.density)))
        if gap > 1e-12:
            raise UsageError(f"Gauge partners must share the density, found a pointwise gap of {gap:.3g}")

    @property
    def sigma_shift(self) -> np.ndarray:
        return phase_shift(self.model, self.original.density, self.diffusion, self.original.mass)


def make_gauge_pair(psi: ComplexWavefunction, model: EntropyModel, diffusion: float) -> GaugePair:
    return GaugePair(psi, gauge_forward(psi, model, diffusion), model, float(diffusion))


def transformed_phase(h: HydroPair, model: EntropyModel, diffusion: float) -> HydroPair:
    """Hydrodynamic pair with the phase sigma = Sigma - m D ln kappa(rho)."""
    shift = phase_shift(model, np.maximum(h.rho, 0.0), _constant_diffusion(diffusion), h.mass)
    return HydroPair(h.grid, h.rho, h.sigma_phase - shift, h.hbar, h.mass)


def potential_difference(
    model: EntropyModel, rho: np.ndarray, diffusion: float, grid, mass: float = MASS
) -> np.ndarray:
    """-(m D^2 / 2) f1(rho) (drho/dx)^2; this part of the transformed potential leaves the continuity equation alone."""
    return -0.5 * mass * diffusion ** 2 * f1(model, rho) * spatial_derivative(rho, grid) ** 2


def transformed_nonlinearities(
    model: EntropyModel,
    diffusion: float,
    h: HydroPair,
    g_coeffs: Sequence[float] = (),
    drop_potential_difference: bool = False,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Nonlinearities of the gauge-transformed NSE.

    W~ = (m/2)(gamma' - 1) u~^2 + m D^2 [f1 rho'' + f2 (rho')^2] + G(rho) and
    Wcal~ = -(hbar / 2 rho) d[(gamma - rho) u~]/dx with u~ = dsigma/dx / m.

    Args:
        model: Entropy catalog entry
        diffusion: Constant diffusion coefficient D
        h: Hydrodynamic fields in the transformed phase sigma
        g_coeffs: Coefficients of G(rho), increasing order
        drop_potential_difference: Drop the m D^2 bracket, which gives the NSE obtained by quantizing the
         drift-only continuity equation directly

    Returns:
        (W~, Wcal~); Wcal~ vanishes for linear drift
    """
    diffusion = _constant_diffusion(diffusion)
    grid, m = h.grid, h.mass
    rho = np.maximum(h.rho, 0.0)
    velocity = drift_velocity(h)
    real = Polynomial(g_coeffs)(rho) if len(g_coeffs) else np.zeros(grid.shape)
    imaginary = np.zeros(grid.shape)
    if not model.linear_drift:
        real = real + 0.5 * m * (d_gamma(model, rho) - 1) * velocity ** 2
        excess = (gamma_drift(model, rho) - rho) * velocity
        imaginary = -h.hbar / (2 * np.maximum(rho, model.rho_floor)) * spatial_derivative(excess, grid)
    if diffusion != 0 and not drop_potential_difference:
        grad = spatial_derivative(rho, grid)
        real = real + m * diffusion ** 2 * (
            f1(model, rho) * spatial_derivative(rho, grid, 2) + f2(model, rho) * grad ** 2
        )
    return real, imaginary


def transformed_rhs(
    scenario: NseScenario, phi: ComplexWavefunction, drop_potential_difference: bool = False
) -> np.ndarray:
    """d phi / dt under the transformed NSE."""
    return _transformed_rate(scenario, phi.values, drop_potential_difference)


def _transformed_rate(scenario: NseScenario, values: np.ndarray, drop: bool) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        return np.full_like(values, np.nan)
    rate = linear_schrodinger_rhs(values, scenario.grid, scenario.potential, scenario.hbar, scenario.mass)
    phi = ComplexWavefunction(scenario.grid, values, scenario.hbar, scenario.mass)
    h = polar_decompose(phi, scenario.model.rho_floor)
    real, imaginary = transformed_nonlinearities(
        scenario.model, scenario.diffusion, h, scenario.g_coeffs, drop
    )
    return rate + (real + 1j * imaginary) * values / (1j * scenario.hbar)


def transformed_energy(
    scenario: NseScenario, phi: ComplexWavefunction, drop_potential_difference: bool = False
) -> float:
    """
    Energy of the transformed NSE: integral of (hbar^2 / 2m)|phi'|^2 + U^ + V rho with
    U^ = (m/2)(gamma - rho) u~^2 - (m D^2 / 2) f1 (rho')^2 + U(rho).

    It equals hamiltonian_energy of the original wavefunction.
    """
    return _transformed_energy(scenario, phi.values, drop_potential_difference)


def _transformed_energy(scenario: NseScenario, values: np.ndarray, drop: bool) -> float:
    model, grid, m, hbar = scenario.model, scenario.grid, scenario.mass, scenario.hbar
    gradient = spatial_derivative(values, grid)
    rho = np.abs(values) ** 2
    velocity = hbar * np.imag(np.conj(values) * gradient) / (m * np.maximum(rho, model.rho_floor))
    u_hat, u_hat_1 = _nonlinear_potentials(scenario, rho, velocity)
    kinetic = (hbar ** 2 / (2 * m)) * np.abs(gradient) ** 2
    return integrate(kinetic + (u_hat_1 if drop else u_hat) + scenario.potential * rho, grid)


def transformed_potentials(scenario: NseScenario, h: HydroPair) -> Tuple[np.ndarray, np.ndarray]:
    """
    The two nonlinear potentials of the transformed Hamiltonian density.

    Args:
        scenario: Problem definition with a constant diffusion coefficient
        h: Hydrodynamic pair of phi, so its phase is the shifted phase sigma

    Returns:
        (U^, U^_1) where U^ includes the -(m D^2 / 2) f1 (rho')^2 term and U^_1 does not
    """
    return _nonlinear_potentials(scenario, np.maximum(h.rho, 0.0), drift_velocity(h))


def _nonlinear_potentials(scenario: NseScenario, rho: np.ndarray, velocity: np.ndarray):
    model, m = scenario.model, scenario.mass
    u_hat_1 = scenario.u_poly(rho)
    if not model.linear_drift:
        u_hat_1 = u_hat_1 + 0.5 * m * (gamma_drift(model, rho) - rho) * velocity ** 2
    diffusion = _constant_diffusion(scenario.diffusion)
    if diffusion == 0:
        return u_hat_1, u_hat_1
    return u_hat_1 + potential_difference(model, rho, diffusion, scenario.grid, m), u_hat_1


def quantum_current(model: EntropyModel, diffusion: float, h: HydroPair) -> np.ndarray:
    """Nonlinear quantum current j = gamma(rho) dSigma/dx / m - D gamma(rho) d ln kappa(rho)/dx."""
    rho = np.maximum(h.rho, 0.0)
    gamma = gamma_drift(model, rho)
    drift = gamma * spatial_derivative(h.sigma_phase, h.grid) / h.mass
    return drift - _constant_diffusion(diffusion) * gamma * spatial_derivative(ln_kappa(model, rho), h.grid)


def transformed_current(model: EntropyModel, h: HydroPair) -> np.ndarray:
    """Drift-only current j~ = gamma(rho) dsigma/dx / m."""
    rho = np.maximum(h.rho, 0.0)
    return gamma_drift(model, rho) * spatial_derivative(h.sigma_phase, h.grid) / h.mass


def current_mismatch(model: EntropyModel, diffusion: float, h: HydroPair) -> float:
    """Largest pointwise difference between j computed from Sigma and j~ computed from the shifted phase."""
    shifted = transformed_phase(h, model, diffusion)
    return float(np.max(np.abs(quantum_current(model, diffusion, h) - transformed_current(model, shifted))))


def evolve_transformed(scenario: NseScenario, drop_potential_difference: bool = False) -> NseTrajectory:
    """
    Evolves phi0 = gauge_forward(psi0) under the transformed NSE.

    Args:
        scenario: The original problem; its psi0 is transformed before the run
        drop_potential_difference: Evolve without the m D^2 bracket

    Returns:
        NseTrajectory of phi, whose energy column is the transformed energy
    """
    check_scenario(scenario)
    phi0 = gauge_forward(scenario.psi0, scenario.model, scenario.diffusion)
    return integrate_wavefunction(
        scenario,
        lambda values, t: _transformed_rate(scenario, values, drop_potential_difference),
        lambda values, t: _transformed_energy(scenario, values, drop_potential_difference),
        psi0=phi0.values,
        label="transformed NSE",
    )


def paired_evolution(
    scenario: NseScenario, drop_potential_difference: bool = False
) -> Tuple[NseTrajectory, NseTrajectory, pd.DataFrame]:
    """
    Evolves psi under the original NSE and phi under the transformed one side by side.

    Args:
        scenario: Problem definition with a constant diffusion coefficient
        drop_potential_difference: Passed to evolve_transformed

    Returns:
        (psi trajectory, phi trajectory, report) where the report has columns t, max_density_discrepancy,
        l2_density_discrepancy, energy_psi, energy_phi
    """
    with ThreadPoolExecutor(max_workers=2) as pool:
        original = pool.submit(evolve_nse, replace(scenario, representation="psi"))
        transformed = pool.submit(evolve_transformed, scenario, drop_potential_difference)
        psi_run, phi_run = original.result(), transformed.result()
    report = pd.DataFrame(
        {
            "t": psi_run.times,
            "max_density_discrepancy": np.max(np.abs(psi_run.densities - phi_run.densities), axis=1),
            "l2_density_discrepancy": [
                l2_distance(a, b, scenario.grid) for a, b in zip(psi_run.densities, phi_run.densities)
            ],
            "energy_psi": psi_run.table["energy"].values,
            "energy_phi": phi_run.table["energy"].values,
        }
    )
    logger.info(
        "gauge check for %s: max density discrepancy %.3g",
        scenario.model.label,
        report["max_density_discrepancy"].max(),
    )
    return psi_run, phi_run, report


def dg_kbar(diffusion: float, hbar: float = HBAR, mass: float = MASS) -> float:
    """
    Effective Planck constant hbar sqrt(1 - (2 m D / hbar)^2) of the linearized Doebner-Goldin equation.

    Example:
        >>> dg_kbar(0.3)
        0.8
    """
    ratio = 2 * mass * diffusion / hbar
    if not 0 <= ratio < 1:
        raise ConfigurationError(f"Linearization needs 0 <= 2 m D / hbar < 1, got {ratio:.6g}")
    return hbar * np.sqrt(1 - ratio ** 2)


def _require_bg(model: EntropyModel):
    if model.variant != "bg" or not model.linear_drift:
        raise ConfigurationError(f"Linearization applies to the BG model with linear drift, got {model.label}")


def dg_linearize(phi: ComplexWavefunction, diffusion: float, model: EntropyModel) -> ComplexWavefunction:
    """
    Maps a transformed BG wavefunction to chi = sqrt(rho) exp(i sigma / kbar), which evolves linearly with hbar -> kbar.

    Args:
        phi: Transformed wavefunction, node free
        diffusion: Constant diffusion coefficient D with 2 m D / hbar < 1
        model: Must be BG with linear drift

    Returns:
        chi, whose hbar attribute is kbar
    """
    _require_bg(model)
    kbar = dg_kbar(diffusion, phi.hbar, phi.mass)
    h = polar_decompose(phi, model.rho_floor)
    values = np.sqrt(h.rho) * np.exp(1j * h.sigma_phase / kbar)
    return ComplexWavefunction(phi.grid, values, kbar, phi.mass)


def dg_delinearize(chi: ComplexWavefunction, hbar: float, model: EntropyModel) -> ComplexWavefunction:
    """Inverse of dg_linearize: phi = sqrt(rho) exp(i sigma / hbar) with sigma read off chi."""
    h = polar_decompose(chi, model.rho_floor)
    values = np.sqrt(h.rho) * np.exp(1j * h.sigma_phase / hbar)
    return ComplexWavefunction(chi.grid, values, hbar, chi.mass)


def dg_chain(scenario: NseScenario) -> pd.DataFrame:
    """
    Three-way comparison of the Doebner-Goldin family: psi under the diffusive NSE, phi under the transformed NSE
    and chi under the linear equation with kbar.

    Args:
        scenario: BG scenario with linear drift, constant D and G = 0

    Returns:
        DataFrame with columns t, l2_original_vs_transformed, l2_transformed_vs_linear, l2_original_vs_linear
    """
    _require_bg(scenario.model)
    kbar = dg_kbar(scenario.diffusion, scenario.hbar, scenario.mass)
    psi_run, phi_run, _ = paired_evolution(scenario)
    phi0 = gauge_forward(scenario.psi0, scenario.model, scenario.diffusion)
    chi0 = dg_linearize(phi0, scenario.diffusion, scenario.model)
    linear = replace(scenario, diffusion=0.0, hbar=kbar, psi0=chi0, g_coeffs=())
    chi_run = evolve_nse(linear)
    grid = scenario.grid
    rows = []
    densities = zip(psi_run.densities, phi_run.densities, chi_run.densities)
    for t, (rho_psi, rho_phi, rho_chi) in zip(psi_run.times, densities):
        rows.append(
            {
                "t": t,
                "l2_original_vs_transformed": l2_distance(rho_psi, rho_phi, grid),
                "l2_transformed_vs_linear": l2_distance(rho_phi, rho_chi, grid),
                "l2_original_vs_linear": l2_distance(rho_psi, rho_chi, grid),
            }
        )
    logger.info("linearized with kbar = %.6g", kbar)
    return pd.DataFrame(rows)
