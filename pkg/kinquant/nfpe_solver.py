import logging
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
import pandas as pd
from scipy import integrate as sp_integrate
from scipy import optimize

from .config import (
    BETA,
    DIAGNOSTICS_CADENCE,
    DIFFUSION,
    FREE_ENERGY_INCREASE_LIMIT,
    FREE_ENERGY_METHODS,
    NEGATIVE_DENSITY_LIMIT,
    NFPE_RHO_FLOOR,
    NORM_DRIFT_LIMIT,
    NORMALIZATION_XTOL,
    STABILITY_FACTOR,
)
from .entropy_catalog import (
    EntropyModel,
    d_ln_kappa,
    entropy_density,
    f_antiderivative,
    f_diffusion,
    gamma_drift,
    kappa_inverse,
    kappa_range,
    ln_kappa,
    phi_antiderivative,
)
from .exceptions import ConfigurationError, ConvergenceError, IntegrationError, RangeError
from .grid_fields import Grid1D, expectation, integrate, l2_distance, spatial_derivative
from .integrators import diffusive_time_step, rk4_step, step_count

logger = logging.getLogger(__name__)


@dataclass
class NfpeScenario:
    """
    Classical nonlinear Fokker-Planck problem in one dimension.

    Args:
        model: Entropy catalog entry fixing kappa and gamma
        grid: Periodic mesh
        potential: External potential V sampled on the grid
        rho0: Normalized initial density
        diffusion: Diffusion coefficient D
        beta: Inverse temperature
        dt: Time step
        t_end: Final time
        cadence: Record every cadence steps
        free_energy_method: 'closed_form' or 'quadrature'
        stability_factor: Prefactor of the explicit bound dt <= c dx^2 / (D max f)
        norm_drift_limit: Mass drift that aborts the run
    """

    model: EntropyModel
    grid: Grid1D
    potential: np.ndarray
    rho0: np.ndarray
    diffusion: float = DIFFUSION
    beta: float = BETA
    dt: float = 1e-3
    t_end: float = 1.0
    cadence: int = DIAGNOSTICS_CADENCE
    free_energy_method: str = "closed_form"
    stability_factor: float = STABILITY_FACTOR
    norm_drift_limit: float = NORM_DRIFT_LIMIT

    def __post_init__(self):
        self.potential = np.asarray(self.potential, dtype=float)
        self.rho0 = np.asarray(self.rho0, dtype=float)
        if self.potential.shape != self.grid.shape or self.rho0.shape != self.grid.shape:
            raise ConfigurationError("Potential and initial density must match the grid")
        if not np.all(np.isfinite(self.potential)):
            raise ConfigurationError("Potential must be finite")
        if not self.diffusion > 0:
            raise ConfigurationError(f"NFPE diffusion must be positive, got {self.diffusion}")
        if not self.beta > 0:
            raise ConfigurationError(f"beta must be positive, got {self.beta}")
        if np.any(self.rho0 < 0):
            raise ConfigurationError("Initial density must be non-negative")
        mass = integrate(self.rho0, self.grid)
        if abs(mass - 1) > 1e-8:
            raise ConfigurationError(f"Initial density must be normalized, integral is {mass:.12g}")
        if self.free_energy_method not in FREE_ENERGY_METHODS:
            raise ConfigurationError(f"Unknown free energy method '{self.free_energy_method}'")


@dataclass
class NfpeTrajectory:
    """Recorded times, density snapshots and the per-record diagnostics table."""

    times: np.ndarray
    states: List[np.ndarray]
    table: pd.DataFrame
    equilibrium: Optional[np.ndarray] = None
    beta_prime: Optional[float] = None

    @property
    def final(self) -> np.ndarray:
        return self.states[-1]


def chemical_potential(model: EntropyModel, rho: np.ndarray, potential: np.ndarray, beta: float) -> np.ndarray:
    """ln kappa(rho) + beta V, whose gradient drives the NFPE current."""
    return ln_kappa(model, rho, floor=NFPE_RHO_FLOOR) + beta * potential


def face_mobility(model: EntropyModel, rho: np.ndarray, mu: np.ndarray) -> np.ndarray:
    """
    Mobility gamma at the face between node i and i + 1.

    The face value is the chain-rule mean (F_{i+1} - F_i) / (ln kappa_{i+1} - ln kappa_i), capped by
    gamma of the upstream (higher chemical potential) node so that an empty node never loses mass.
    """
    rho_next = np.roll(rho, -1)
    lk = ln_kappa(model, rho, floor=NFPE_RHO_FLOOR)
    lk_next = np.roll(lk, -1)
    big_f = f_antiderivative(model, rho)
    d_lk = lk_next - lk
    d_f = np.roll(big_f, -1) - big_f
    close = np.abs(d_lk) <= 1e-10 * (1 + np.abs(lk))
    midpoint = gamma_drift(model, 0.5 * (rho + rho_next))
    chain = np.where(close, midpoint, d_f / np.where(close, 1.0, d_lk))
    gamma = gamma_drift(model, rho)
    donor = np.where(mu >= np.roll(mu, -1), gamma, np.roll(gamma, -1))
    return np.maximum(np.minimum(chain, donor), 0.0)


def nfpe_flux(scenario: NfpeScenario, rho: np.ndarray) -> np.ndarray:
    """
    Probability current at the faces i + 1/2, J = u_drift gamma - D f d(rho)/dx with u_drift = -D beta dV/dx,
    written as -D gamma d(mu)/dx.
    """
    mu = chemical_potential(scenario.model, rho, scenario.potential, scenario.beta)
    mobility = face_mobility(scenario.model, rho, mu)
    return -scenario.diffusion * mobility * (np.roll(mu, -1) - mu) / scenario.grid.spacing


def nfpe_rhs(scenario: NfpeScenario, rho: np.ndarray) -> np.ndarray:
    """
    Time derivative of the density under the nonlinear Fokker-Planck equation.

    Args:
        scenario: Problem definition
        rho: Current density

    Returns:
        -(J_{i+1/2} - J_{i-1/2}) / dx, which sums to zero over the periodic grid
    """
    flux = nfpe_flux(scenario, rho)
    return -(flux - np.roll(flux, 1)) / scenario.grid.spacing


def free_energy(
    model: EntropyModel,
    rho: np.ndarray,
    potential: np.ndarray,
    beta: float,
    grid: Grid1D,
    method: str = "closed_form",
) -> float:
    """
    Constrained entropic functional integral of [Phi(rho) + beta V rho] where Phi is the antiderivative of ln kappa.

    It is the Lyapunov functional of the NFPE, so it decreases along every trajectory.

    Args:
        model: Entropy catalog entry
        rho: Density
        potential: External potential
        beta: Inverse temperature
        grid: Mesh
        method: 'closed_form' uses the analytic antiderivative, 'quadrature' integrates ln kappa
         adaptively at every node

    Returns:
        Free energy value
    """
    if method == "closed_form":
        phi = phi_antiderivative(model, rho)
    elif method == "quadrature":
        phi = quadrature_antiderivative(model, rho)
    else:
        raise ConfigurationError(f"Unknown free energy method '{method}'")
    return integrate(phi + beta * potential * rho, grid)


def quadrature_antiderivative(model: EntropyModel, rho: np.ndarray, epsabs: float = 1e-13) -> np.ndarray:
    """Integral of ln kappa from 0 to rho by adaptive vector quadrature, rho * int_0^1 ln kappa(s rho) ds."""
    rho = np.maximum(np.asarray(rho, dtype=float), 0.0)

    def integrand(s):
        return rho * ln_kappa(model, s * rho, floor=NFPE_RHO_FLOOR)

    value, error, info = sp_integrate.quad_vec(
        integrand, 0.0, 1.0, epsabs=epsabs, epsrel=1e-12, limit=2000, full_output=True
    )
    if not info.success:
        raise ConvergenceError(f"Free energy quadrature did not converge (error estimate {error:.3g})")
    return np.where(rho > 0, value, 0.0)


def entropy(model: EntropyModel, rho: np.ndarray, grid: Grid1D) -> float:
    """Trace-form entropy S = integral of s(rho)."""
    return integrate(entropy_density(model, rho), grid)


def equilibrium_density(
    model: EntropyModel,
    potential: np.ndarray,
    beta: float,
    grid: Grid1D,
) -> Tuple[np.ndarray, float]:
    """
    Stationary density rho = kappa^-1(exp(-beta V - beta')) with beta' fixed by normalization.

    Densities whose target lies below kappa(0+) (finite for Tsallis q > 1) are set to zero, which gives
    compactly supported equilibria.

    Args:
        model: Entropy catalog entry
        potential: External potential on the grid
        beta: Inverse temperature
        grid: Mesh

    Returns:
        (rho_eq, beta_prime)

    Raises:
        ConfigurationError: if no beta' normalizes the density
    """
    potential = np.asarray(potential, dtype=float)
    _, kappa_hi = kappa_range(model)
    v_min = float(np.min(potential))
    lowest = -beta * v_min - np.log(kappa_hi) if np.isfinite(kappa_hi) else -np.inf

    def density(beta_prime):
        return kappa_inverse(model, np.exp(-beta * potential - beta_prime), clip_to_support=True)

    def excess(beta_prime):
        try:
            return integrate(density(beta_prime), grid) - 1.0
        except RangeError:
            return np.inf

    upper = lowest + 1.0 if np.isfinite(lowest) else 0.0
    step = 1.0
    for _ in range(200):
        if excess(upper) < 0:
            break
        upper += step
        step *= 2
    else:
        raise ConfigurationError("Could not bracket the normalization constant from above")

    lower, step = upper, 1.0
    for _ in range(200):
        if np.isfinite(lowest):
            lower = lowest + 0.5 * (lower - lowest)
        else:
            lower -= step
            step *= 2
        if excess(lower) > 0:
            break
    else:
        raise ConfigurationError("No normalizable equilibrium: the density cannot reach unit mass")
    if not np.isfinite(excess(lower)):
        lower = _finite_lower(excess, lower, upper)

    beta_prime = optimize.brentq(excess, lower, upper, xtol=NORMALIZATION_XTOL, rtol=4 * np.finfo(float).eps)
    rho_eq = density(beta_prime)
    logger.info("equilibrium for %s: beta' = %.12g", model.label, beta_prime)
    return rho_eq, float(beta_prime)


def _finite_lower(excess, lower: float, upper: float) -> float:
    for _ in range(200):
        middle = 0.5 * (lower + upper)
        value = excess(middle)
        if np.isfinite(value) and value > 0:
            return middle
        if np.isfinite(value):
            upper = middle
        else:
            lower = middle
    raise ConfigurationError("Could not find a finite lower bracket for the normalization constant")


def max_diffusivity(model: EntropyModel, rho: np.ndarray) -> float:
    """Largest f(rho) over occupied nodes."""
    occupied = rho[rho > 0]
    if occupied.size == 0:
        return 0.0
    return float(np.max(f_diffusion(model, occupied, floor=NFPE_RHO_FLOOR)))


def stable_time_step(scenario: NfpeScenario, rho: Optional[np.ndarray] = None) -> float:
    """Explicit bound c dx^2 / (D max f(rho))."""
    rho = scenario.rho0 if rho is None else rho
    coefficient = scenario.diffusion * max_diffusivity(scenario.model, rho)
    return diffusive_time_step(scenario.grid.spacing, coefficient, scenario.stability_factor)


def _record(scenario, rho, t, rho_eq) -> dict:
    return {
        "t": t,
        "norm": integrate(rho, scenario.grid),
        "free_energy": free_energy(
            scenario.model, rho, scenario.potential, scenario.beta, scenario.grid, scenario.free_energy_method
        ),
        "entropy": entropy(scenario.model, rho, scenario.grid),
        "mean_potential": expectation(rho, scenario.potential, scenario.grid),
        "l2_to_equilibrium": l2_distance(rho, rho_eq, scenario.grid) if rho_eq is not None else np.nan,
        "min_rho": float(np.min(rho)),
    }


def evolve_nfpe(
    scenario: NfpeScenario,
    compare_equilibrium: bool = True,
    free_energy_increase_limit: float = FREE_ENERGY_INCREASE_LIMIT,
) -> NfpeTrajectory:
    """
    Integrates the NFPE with explicit RK4 and records diagnostics every cadence steps.

    Args:
        scenario: Problem definition
        compare_equilibrium: Whether to compute the analytic equilibrium and track the L2 distance to it
        free_energy_increase_limit: Relative free energy growth between records that aborts the run

    Returns:
        NfpeTrajectory with states and a diagnostics table (t, norm, free_energy, entropy, mean_potential,
        l2_to_equilibrium, min_rho)

    Raises:
        ConfigurationError: if dt exceeds the diffusive stability bound
        IntegrationError: on NaN, mass drift above the limit, negative density below -1e-8 or a free energy
         increase beyond round-off
    """
    bound = stable_time_step(scenario)
    if scenario.dt > bound:
        raise ConfigurationError(
            f"dt = {scenario.dt:.3g} exceeds the diffusive stability bound; use dt <= {bound:.3g}"
        )
    rho_eq, beta_prime = (None, None)
    if compare_equilibrium:
        rho_eq, beta_prime = equilibrium_density(scenario.model, scenario.potential, scenario.beta, scenario.grid)

    n_steps = step_count(scenario.t_end, scenario.dt)
    dt = scenario.t_end / n_steps
    logger.info("evolving NFPE for %s: %d steps of dt = %.4g", scenario.model.label, n_steps, dt)

    rho = scenario.rho0.copy()
    times, states, rows = [0.0], [rho.copy()], [_record(scenario, rho, 0.0, rho_eq)]
    rhs = lambda state, t: nfpe_rhs(scenario, state)
    for step in range(1, n_steps + 1):
        rho = rk4_step(rhs, rho, (step - 1) * dt, dt)
        if not np.all(np.isfinite(rho)):
            raise IntegrationError("NFPE state became non-finite", step, states[-1])
        if np.min(rho) < NEGATIVE_DENSITY_LIMIT:
            raise IntegrationError(f"Density undershoot {np.min(rho):.3g}", step, rho)
        if step % scenario.cadence == 0 or step == n_steps:
            mass = integrate(rho, scenario.grid)
            if abs(mass - 1) > scenario.norm_drift_limit:
                raise IntegrationError(f"Mass drifted to {mass:.12g}", step, rho)
            t = step * dt
            times.append(t)
            states.append(rho.copy())
            rows.append(_record(scenario, rho, t, rho_eq))
            check_free_energy_decrease(
                rows[-2]["free_energy"], rows[-1]["free_energy"], step, rho, free_energy_increase_limit
            )

    return NfpeTrajectory(np.array(times), states, pd.DataFrame(rows), rho_eq, beta_prime)


def check_free_energy_decrease(
    previous: float,
    current: float,
    step: int,
    rho: Optional[np.ndarray] = None,
    limit: float = FREE_ENERGY_INCREASE_LIMIT,
):
    """
    Fails when the free energy grew between two records by more than round-off.

    Raises:
        IntegrationError: if current - previous exceeds limit * max(|previous|, 1)
    """
    increase = current - previous
    if increase > limit * max(abs(previous), 1.0):
        raise IntegrationError(f"Free energy increased by {increase:.3g}, the H-theorem is violated", step, rho)


def drift_shift_current(
    model: EntropyModel,
    rho: np.ndarray,
    potential: np.ndarray,
    diffusion: float,
    beta: float,
    grid: Grid1D,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    NFPE current evaluated two ways: drift plus diffusion, and a pure drift with the diffusion absorbed into
    the velocity u_drift - D d(ln kappa)/dx, the classical counterpart of the gauge transformation.

    Returns:
        (drift_plus_diffusion, shifted_drift) node currents
    """
    u_drift = -diffusion * beta * spatial_derivative(potential, grid)
    grad_rho = spatial_derivative(rho, grid)
    gamma = gamma_drift(model, rho)
    direct = u_drift * gamma - diffusion * f_diffusion(model, rho) * grad_rho
    shifted_velocity = u_drift - diffusion * d_ln_kappa(model, rho) * grad_rho
    return direct, shifted_velocity * gamma
