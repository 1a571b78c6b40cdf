import logging
from dataclasses import dataclass, field
from typing import Callable, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd
from numpy.polynomial import Polynomial

from .config import (
    BOUNDARY_DENSITY_LIMIT,
    DIAGNOSTICS_CADENCE,
    DIFFUSION,
    HBAR,
    MASS,
    NORM_DRIFT_LIMIT,
    REPRESENTATIONS,
    STABILITY_FACTOR,
)
from .entropy_catalog import EntropyModel, d_gamma, f_antiderivative, f_diffusion, gamma_drift
from .exceptions import ConfigurationError, DecompositionError, IntegrationError
from .grid_fields import (
    ComplexWavefunction,
    Grid1D,
    HydroPair,
    boundary_density,
    hydro_phase_gradient,
    integrate,
    polar_compose,
    polar_decompose,
    quantum_potential,
    spatial_derivative,
)
from .integrators import diffusive_time_step, rk4_step, step_count

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class VariableDiffusion:
    """
    Diffusion coefficient D(t, x) together with its analytic partial derivatives.

    Args:
        value: Callable D(t, x)
        time_rate: Callable dD/dt(t, x)
        gradient: Callable dD/dx(t, x)
        label: Name used in logs and reports
    """

    value: Callable
    time_rate: Optional[Callable] = None
    gradient: Optional[Callable] = None
    label: str = "custom"

    def __call__(self, t: float, x: np.ndarray) -> np.ndarray:
        return _broadcast(self.value(t, x), x)

    def partial_t(self, t: float, x: np.ndarray) -> np.ndarray:
        if self.time_rate is None:
            raise ConfigurationError(f"Diffusion profile '{self.label}' has no time derivative evaluator")
        return _broadcast(self.time_rate(t, x), x)

    def partial_x(self, t: float, x: np.ndarray) -> np.ndarray:
        if self.gradient is None:
            raise ConfigurationError(f"Diffusion profile '{self.label}' has no spatial derivative evaluator")
        return _broadcast(self.gradient(t, x), x)


def _broadcast(values, x: np.ndarray) -> np.ndarray:
    return np.array(np.broadcast_to(np.asarray(values, dtype=float), np.shape(x)))


def constant_diffusion(d0: float) -> VariableDiffusion:
    return VariableDiffusion(
        value=lambda t, x: d0,
        time_rate=lambda t, x: 0.0,
        gradient=lambda t, x: 0.0,
        label=f"constant(D0={d0:g})",
    )


def time_sine_diffusion(d0: float, epsilon: float) -> VariableDiffusion:
    """D(t) = D0 (1 + epsilon sin t)."""
    return VariableDiffusion(
        value=lambda t, x: d0 * (1 + epsilon * np.sin(t)),
        time_rate=lambda t, x: d0 * epsilon * np.cos(t),
        gradient=lambda t, x: 0.0,
        label=f"time_sine(D0={d0:g}, epsilon={epsilon:g})",
    )


def space_tanh_diffusion(d0: float, epsilon: float, scale: float = 1.0) -> VariableDiffusion:
    """D(x) = D0 (1 + epsilon tanh(x / scale))."""
    return VariableDiffusion(
        value=lambda t, x: d0 * (1 + epsilon * np.tanh(x / scale)),
        time_rate=lambda t, x: 0.0,
        gradient=lambda t, x: d0 * epsilon / scale / np.cosh(x / scale) ** 2,
        label=f"space_tanh(D0={d0:g}, epsilon={epsilon:g})",
    )


def make_diffusion(profile: str, d0: float, epsilon: float = 0.0) -> Union[float, VariableDiffusion]:
    """Diffusion from a profile name: a plain float for 'constant', a VariableDiffusion otherwise."""
    if profile == "constant":
        return float(d0)
    if profile == "time_sine":
        return time_sine_diffusion(d0, epsilon)
    if profile == "space_tanh":
        return space_tanh_diffusion(d0, epsilon)
    raise ConfigurationError(f"Unknown diffusion profile '{profile}'")


Diffusion = Union[float, VariableDiffusion]


@dataclass
class NseScenario:
    """
    Nonlinear Schroedinger problem with complex nonlinearity W + i Wcal.

    Args:
        model: Entropy catalog entry fixing kappa and gamma
        grid: Periodic mesh
        potential: External potential V sampled on the grid
        psi0: Normalized, node-free initial wavefunction
        diffusion: Constant D >= 0 or a VariableDiffusion D(t, x)
        g_coeffs: Coefficients c_n of G(rho) = sum_n c_n rho^n, increasing order
        hbar: Reduced Planck constant
        mass: Particle mass
        dt: Time step
        t_end: Final time
        cadence: Record diagnostics every cadence steps
        representation: 'psi' evolves the wavefunction, 'hydro' evolves (rho, Sigma)
        stability_factor: Prefactor c of the explicit time step bounds
        norm_drift_limit: Norm drift that aborts the run, relative to expected_norm
        expected_norm: Integral of |psi0|^2; 1 except for unnormalized plane waves
    """

    model: EntropyModel
    grid: Grid1D
    potential: np.ndarray
    psi0: ComplexWavefunction
    diffusion: Diffusion = DIFFUSION
    g_coeffs: Sequence[float] = ()
    hbar: float = HBAR
    mass: float = MASS
    dt: float = 1e-3
    t_end: float = 1.0
    cadence: int = DIAGNOSTICS_CADENCE
    representation: str = "psi"
    stability_factor: float = STABILITY_FACTOR
    norm_drift_limit: float = NORM_DRIFT_LIMIT
    expected_norm: float = 1.0
    g_poly: Polynomial = field(init=False, repr=False)
    u_poly: Polynomial = field(init=False, repr=False)

    def __post_init__(self):
        self.potential = np.asarray(self.potential, dtype=float)
        if self.potential.shape != self.grid.shape:
            raise ConfigurationError("Potential must match the grid")
        if self.psi0.grid != self.grid:
            raise ConfigurationError("Initial wavefunction lives on a different grid")
        if not (self.hbar > 0 and self.mass > 0):
            raise ConfigurationError(f"hbar and mass must be positive, got {self.hbar}, {self.mass}")
        if self.representation not in REPRESENTATIONS:
            raise ConfigurationError(
                f"Unknown representation '{self.representation}', expected one of {REPRESENTATIONS}"
            )
        if isinstance(self.diffusion, VariableDiffusion):
            lowest = min(
                float(np.min(self.diffusion(t, self.grid.coordinates)))
                for t in np.linspace(0.0, self.t_end, 65)
            )
            if not lowest > 0:
                raise ConfigurationError(f"{self.diffusion.label} must stay positive, reaches {lowest:.3g}")
        elif self.diffusion < 0:
            raise ConfigurationError(f"Diffusion must be non-negative, got {self.diffusion}")
        norm = self.psi0.norm
        if abs(norm - self.expected_norm) > 1e-8 * self.expected_norm:
            raise ConfigurationError(
                f"Initial wavefunction must have norm {self.expected_norm:g}, integral is {norm:.12g}"
            )
        polar_decompose(self.psi0, self.model.rho_floor)
        coeffs = np.asarray(self.g_coeffs, dtype=float) if len(self.g_coeffs) else np.zeros(1)
        self.g_poly = Polynomial(coeffs)
        self.u_poly = self.g_poly.integ()

    @property
    def variable_diffusion(self) -> bool:
        return isinstance(self.diffusion, VariableDiffusion)

    @property
    def is_linear(self) -> bool:
        """True when every nonlinearity vanishes identically (linear drift, D = 0, G = 0)."""
        return (
            self.model.linear_drift
            and not self.variable_diffusion
            and self.diffusion == 0
            and not np.any(self.g_poly.coef)
        )

    def diffusion_at(self, t: float) -> Union[float, np.ndarray]:
        if self.variable_diffusion:
            return self.diffusion(t, self.grid.coordinates)
        return float(self.diffusion)

    def max_diffusion(self) -> float:
        if not self.variable_diffusion:
            return float(self.diffusion)
        times = np.linspace(0.0, self.t_end, 65)
        return float(max(np.max(self.diffusion(t, self.grid.coordinates)) for t in times))


@dataclass
class NseTrajectory:
    """Recorded wavefunction samples and the per-record diagnostics table."""

    times: np.ndarray
    states: List[np.ndarray]
    table: pd.DataFrame
    grid: Grid1D
    hbar: float = HBAR
    mass: float = MASS

    def wavefunction(self, index: int) -> ComplexWavefunction:
        return ComplexWavefunction(self.grid, self.states[index], self.hbar, self.mass)

    @property
    def densities(self) -> np.ndarray:
        return np.abs(np.array(self.states)) ** 2

    @property
    def final(self) -> ComplexWavefunction:
        return self.wavefunction(-1)


def _scaled_divergence(diffusion, values: np.ndarray, grid: Grid1D) -> np.ndarray:
    # d(D values)/dx, written D d(values)/dx for constant D
    if np.ndim(diffusion) == 0:
        return diffusion * spatial_derivative(values, grid)
    return spatial_derivative(diffusion * values, grid)


def _diffusive_divergence(diffusion, big_f: np.ndarray, grid: Grid1D) -> np.ndarray:
    # d/dx (D dF/dx) with F the antiderivative of f
    if np.ndim(diffusion) == 0:
        return diffusion * spatial_derivative(big_f, grid, 2)
    return spatial_derivative(diffusion * spatial_derivative(big_f, grid), grid)


def _has_diffusion(diffusion) -> bool:
    return np.ndim(diffusion) > 0 or diffusion != 0


def drift_velocity(h: HydroPair) -> np.ndarray:
    """u_drift = dSigma/dx / m."""
    return hydro_phase_gradient(h) / h.mass


def nonlinearity_W(scenario: NseScenario, h: HydroPair, t: float = 0.0) -> np.ndarray:
    """
    Real part of the nonlinearity, W = (m/2)(gamma' - 1) u^2 + m f(rho) d(D u)/dx + G(rho).

    Args:
        scenario: Problem definition
        h: Hydrodynamic fields of the current state
        t: Time, used by a VariableDiffusion

    Returns:
        W sampled on the grid; identically zero for linear drift, D = 0 and G = 0
    """
    model, m = scenario.model, scenario.mass
    rho = np.maximum(h.rho, 0.0)
    velocity = drift_velocity(h)
    out = scenario.g_poly(rho)
    diffusion = scenario.diffusion_at(t)
    if _has_diffusion(diffusion):
        out = out + m * f_diffusion(model, rho) * _scaled_divergence(diffusion, velocity, scenario.grid)
    if not model.linear_drift:
        out = out + 0.5 * m * (d_gamma(model, rho) - 1) * velocity ** 2
    return out


def nonlinearity_Wcal(scenario: NseScenario, h: HydroPair, t: float = 0.0) -> np.ndarray:
    """
    Imaginary part of the nonlinearity, -(hbar / 2 rho) d[(gamma - rho) u]/dx + (hbar / 2 rho) d(D dF/dx)/dx.

    Args:
        scenario: Problem definition
        h: Hydrodynamic fields of the current state
        t: Time, used by a VariableDiffusion

    Returns:
        Wcal sampled on the grid
    """
    model, grid = scenario.model, scenario.grid
    rho = np.maximum(h.rho, 0.0)
    scale = scenario.hbar / (2 * np.maximum(rho, model.rho_floor))
    out = np.zeros(grid.shape)
    diffusion = scenario.diffusion_at(t)
    if _has_diffusion(diffusion):
        out = out + scale * _diffusive_divergence(diffusion, f_antiderivative(model, rho), grid)
    if not model.linear_drift:
        excess = (gamma_drift(model, rho) - rho) * drift_velocity(h)
        out = out - scale * spatial_derivative(excess, grid)
    return out


def linear_schrodinger_rhs(
    values: np.ndarray, grid: Grid1D, potential: np.ndarray, hbar: float = HBAR, mass: float = MASS
) -> np.ndarray:
    """(1 / i hbar) [-(hbar^2 / 2m) psi'' + V psi]."""
    kinetic = -(hbar ** 2 / (2 * mass)) * spatial_derivative(values, grid, 2)
    return (kinetic + potential * values) / (1j * hbar)


def _psi_rate(scenario: NseScenario, values: np.ndarray, t: float) -> np.ndarray:
    if not np.all(np.isfinite(values)):
        return np.full_like(values, np.nan)
    rate = linear_schrodinger_rhs(values, scenario.grid, scenario.potential, scenario.hbar, scenario.mass)
    if scenario.is_linear:
        return rate
    psi = ComplexWavefunction(scenario.grid, values, scenario.hbar, scenario.mass)
    h = polar_decompose(psi, scenario.model.rho_floor)
    nonlinear = nonlinearity_W(scenario, h, t) + 1j * nonlinearity_Wcal(scenario, h, t)
    return rate + nonlinear * values / (1j * scenario.hbar)


def nse_rhs_psi(scenario: NseScenario, psi: ComplexWavefunction, t: float = 0.0) -> np.ndarray:
    """
    Time derivative of the wavefunction, (1 / i hbar)[-(hbar^2 / 2m) Laplacian psi + (W + i Wcal) psi + V psi].

    Args:
        scenario: Problem definition
        psi: Current wavefunction
        t: Time, used by a VariableDiffusion

    Returns:
        d psi / dt on the grid

    Raises:
        DecompositionError: if psi has a node inside its support
    """
    return _psi_rate(scenario, psi.values, t)


def continuity_rate(
    model: EntropyModel,
    rho: np.ndarray,
    velocity: np.ndarray,
    diffusion,
    grid: Grid1D,
) -> np.ndarray:
    """-d/dx [u gamma(rho) - D f(rho) drho/dx], the NFPE current divergence."""
    rho = np.maximum(rho, 0.0)
    out = -spatial_derivative(velocity * gamma_drift(model, rho), grid)
    if _has_diffusion(diffusion):
        out = out + _diffusive_divergence(diffusion, f_antiderivative(model, rho), grid)
    return out


def hydro_rhs(scenario: NseScenario, h: HydroPair, t: float = 0.0) -> Tuple[np.ndarray, np.ndarray]:
    """
    Coupled evolution of density and phase.

    drho/dt = -d/dx [u gamma - D f drho/dx] and
    dSigma/dt = -[(m/2) gamma' u^2 + U_q + m f d(D u)/dx + G + V] with u = dSigma/dx / m.

    Args:
        scenario: Problem definition
        h: Current hydrodynamic fields
        t: Time, used by a VariableDiffusion

    Returns:
        (drho_dt, dsigma_dt)
    """
    model, grid, m = scenario.model, scenario.grid, scenario.mass
    rho = np.maximum(h.rho, 0.0)
    velocity = drift_velocity(h)
    diffusion = scenario.diffusion_at(t)
    drho = continuity_rate(model, rho, velocity, diffusion, grid)
    bracket = (
        0.5 * m * d_gamma(model, rho) * velocity ** 2
        + quantum_potential(rho, grid, scenario.hbar, m, model.rho_floor)
        + scenario.g_poly(rho)
        + scenario.potential
    )
    if _has_diffusion(diffusion):
        bracket = bracket + m * f_diffusion(model, rho) * _scaled_divergence(diffusion, velocity, grid)
    return drho, -bracket


def implied_hydro_rates(
    scenario: NseScenario, psi: ComplexWavefunction, t: float = 0.0
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Density and phase rates implied by the wavefunction rhs: drho/dt = 2 Re(psi^* dpsi/dt) and
    dSigma/dt = hbar Im(psi^* dpsi/dt) / rho.
    """
    rate = nse_rhs_psi(scenario, psi, t)
    product = np.conj(psi.values) * rate
    rho = np.maximum(psi.density, scenario.model.rho_floor)
    return 2 * product.real, scenario.hbar * product.imag / rho


def hamiltonian_energy(
    scenario: NseScenario, state: Union[HydroPair, ComplexWavefunction], t: float = 0.0
) -> float:
    """
    Conserved energy of the canonical NSE.

    E = integral of [(hbar^2 / 2m)|psi'|^2 + (m/2)(gamma - rho) u^2 - D F' rho' Sigma' + U(rho) + V rho], which equals
    the hydrodynamic form (Sigma')^2 gamma / 2m + (hbar^2 / 8m)(rho')^2 / rho - D f rho' Sigma' + U + V rho.

    Args:
        scenario: Problem definition
        state: Wavefunction or hydrodynamic pair
        t: Time, used by a VariableDiffusion

    Returns:
        Energy
    """
    values = polar_compose(state).values if isinstance(state, HydroPair) else state.values
    return _energy(scenario, values, t)


def _energy(scenario: NseScenario, values: np.ndarray, t: float) -> float:
    model, grid, m, hbar = scenario.model, scenario.grid, scenario.mass, scenario.hbar
    gradient = spatial_derivative(values, grid)
    rho = np.abs(values) ** 2
    current = hbar * np.imag(np.conj(values) * gradient)
    velocity = current / (m * np.maximum(rho, model.rho_floor))
    density = (hbar ** 2 / (2 * m)) * np.abs(gradient) ** 2 + scenario.u_poly(rho) + scenario.potential * rho
    if not model.linear_drift:
        density = density + 0.5 * m * (gamma_drift(model, rho) - rho) * velocity ** 2
    diffusion = scenario.diffusion_at(t)
    if _has_diffusion(diffusion):
        grad_big_f = spatial_derivative(f_antiderivative(model, rho), grid)
        density = density - diffusion * grad_big_f * m * velocity
    return integrate(density, grid)


def well_posedness_ratio(scenario: NseScenario) -> float:
    """Largest 2 m D f(rho) / hbar over the support of the initial density."""
    rho = scenario.psi0.density
    support = rho[rho >= scenario.model.rho_floor]
    f_max = float(np.max(f_diffusion(scenario.model, support)))
    return 2 * scenario.mass * scenario.max_diffusion() * f_max / scenario.hbar


def stable_time_step(scenario: NseScenario) -> float:
    """Minimum of the dispersive bound c m dx^2 / hbar and the diffusive bound c dx^2 / (D max f)."""
    dx = scenario.grid.spacing
    dispersive = scenario.stability_factor * scenario.mass * dx ** 2 / scenario.hbar
    rho = scenario.psi0.density
    support = rho[rho >= scenario.model.rho_floor]
    coefficient = scenario.max_diffusion() * float(np.max(f_diffusion(scenario.model, support)))
    return min(dispersive, diffusive_time_step(dx, coefficient, scenario.stability_factor))


def check_scenario(scenario: NseScenario) -> None:
    """
    Rejects scenarios the explicit integrator cannot handle.

    Raises:
        ConfigurationError: if 2 m D f / hbar >= 1 somewhere on the support (the evolution is ill posed there)
         or if dt exceeds the stability bound
    """
    ratio = well_posedness_ratio(scenario)
    if ratio >= 1:
        raise ConfigurationError(
            f"2 m D f(rho) / hbar reaches {ratio:.3g} on the initial support; the evolution needs it below 1"
        )
    bound = stable_time_step(scenario)
    if scenario.dt > bound:
        raise ConfigurationError(f"dt = {scenario.dt:.3g} exceeds the stability bound; use dt <= {bound:.3g}")


def _record(scenario: NseScenario, values: np.ndarray, t: float, energy: Callable) -> dict:
    grid, hbar = scenario.grid, scenario.hbar
    rho = np.abs(values) ** 2
    gradient = spatial_derivative(values, grid)
    return {
        "t": t,
        "norm": integrate(rho, grid),
        "x_mean": integrate(grid.coordinates * rho, grid),
        "p_mean": integrate(hbar * np.imag(np.conj(values) * gradient), grid),
        "energy": energy(values, t),
        "boundary_density": boundary_density(rho),
    }


def integrate_wavefunction(
    scenario: NseScenario,
    rate: Callable,
    energy: Callable,
    psi0: Optional[np.ndarray] = None,
    label: str = "NSE",
) -> NseTrajectory:
    """
    RK4 driver shared by every wavefunction evolution.

    Args:
        scenario: Grid, constants, dt, t_end, cadence and limits
        rate: Callable rate(values, t) returning d psi / dt
        energy: Callable energy(values, t) recorded in the diagnostics table
        psi0: Initial samples; defaults to scenario.psi0
        label: Name used in logs

    Returns:
        NseTrajectory
    """
    values = scenario.psi0.values.copy() if psi0 is None else np.asarray(psi0, dtype=complex).copy()
    return _run(scenario, values, rate, lambda state: state, energy, label)


def _run(scenario, state, rhs, to_values, energy, label) -> NseTrajectory:
    n_steps = step_count(scenario.t_end, scenario.dt)
    dt = scenario.t_end / n_steps
    logger.info("evolving %s for %s: %d steps of dt = %.4g", label, scenario.model.label, n_steps, dt)

    values = to_values(state)
    times, states, rows = [0.0], [values.copy()], [_record(scenario, values, 0.0, energy)]
    warned = False
    for step in range(1, n_steps + 1):
        try:
            state = rk4_step(rhs, state, (step - 1) * dt, dt)
        except DecompositionError as err:
            err.step, err.state = step, to_values(state)
            logger.error("node formed during %s evolution at step %d", label, step)
            raise
        values = to_values(state)
        if not np.all(np.isfinite(values)):
            raise IntegrationError(f"{label} state became non-finite", step, states[-1])
        if step % scenario.cadence == 0 or step == n_steps:
            t = step * dt
            row = _record(scenario, values, t, energy)
            if abs(row["norm"] - scenario.expected_norm) > scenario.norm_drift_limit * scenario.expected_norm:
                raise IntegrationError(f"Norm drifted to {row['norm']:.12g}", step, values)
            if row["boundary_density"] > BOUNDARY_DENSITY_LIMIT and not warned:
                logger.warning("density %.3g reached the box edge at t = %.4g", row["boundary_density"], t)
                warned = True
            times.append(t)
            states.append(values.copy())
            rows.append(row)

    table = pd.DataFrame(rows)
    logger.info(
        "%s finished: norm drift %.3g, energy drift %.3g",
        label,
        abs(table["norm"].iloc[-1] - scenario.expected_norm),
        abs(table["energy"].iloc[-1] - table["energy"].iloc[0]),
    )
    return NseTrajectory(np.array(times), states, table, scenario.grid, scenario.hbar, scenario.mass)


def evolve_nse(scenario: NseScenario) -> NseTrajectory:
    """
    Evolves the NSE in the scenario's representation with RK4, recording diagnostics every cadence steps.

    Args:
        scenario: Problem definition

    Returns:
        NseTrajectory whose table has columns t, norm, x_mean, p_mean, energy, boundary_density

    Raises:
        ConfigurationError: if the scenario is ill posed or dt is above the stability bound
        IntegrationError: on non-finite states or norm drift above the limit
        DecompositionError: if a node forms inside the support (the error carries the state)
    """
    check_scenario(scenario)
    energy = lambda values, t: _energy(scenario, values, t)
    if scenario.representation == "psi":
        return integrate_wavefunction(scenario, lambda values, t: _psi_rate(scenario, values, t), energy)

    h0 = polar_decompose(scenario.psi0, scenario.model.rho_floor)

    def rhs(state, t):
        rho, sigma = state
        if not (np.all(np.isfinite(rho)) and np.all(np.isfinite(sigma))):
            return np.full_like(rho, np.nan), np.full_like(sigma, np.nan)
        return hydro_rhs(scenario, HydroPair(scenario.grid, rho, sigma, scenario.hbar, scenario.mass), t)

    def to_values(state):
        rho, sigma = state
        return np.sqrt(np.maximum(rho, 0.0)) * np.exp(1j * sigma / scenario.hbar)

    return _run(scenario, (h0.rho, h0.sigma_phase), rhs, to_values, energy, "NSE (hydro)")


def free_gaussian_packet(
    grid: Grid1D,
    t: float,
    center: float = 0.0,
    width: float = 1.0,
    boost: float = 0.0,
    hbar: float = HBAR,
    mass: float = MASS,
) -> ComplexWavefunction:
    """
    Exact free-particle evolution of the packet built by gaussian_packet, on the infinite line.

    Args:
        grid: Grid1D to sample on
        t: Time
        center: Initial center
        width: Initial standard deviation of the density
        boost: Carrier wavenumber k0
        hbar: Reduced Planck constant
        mass: Particle mass

    Returns:
        Analytic wavefunction at time t
    """
    x = grid.coordinates
    spread = 1 + 1j * hbar * t / (2 * mass * width ** 2)
    group = hbar * boost / mass
    exponent = (
        -((x - center - group * t) ** 2) / (4 * width ** 2 * spread)
        + 1j * boost * x
        - 1j * hbar * boost ** 2 * t / (2 * mass)
    )
    values = (2 * np.pi * width ** 2) ** -0.25 * spread ** -0.5 * np.exp(exponent)
    return ComplexWavefunction(grid, values, hbar, mass)


def coherent_state(
    grid: Grid1D,
    t: float,
    displacement: float,
    omega0: float = 1.0,
    hbar: float = HBAR,
    mass: float = MASS,
) -> ComplexWavefunction:
    """Harmonic-oscillator ground state displaced by x0 at t = 0, evolved exactly in V = m omega0^2 x^2 / 2."""
    x = grid.coordinates
    x_c = displacement * np.cos(omega0 * t)
    p_c = -mass * omega0 * displacement * np.sin(omega0 * t)
    phase = -0.5 * omega0 * t - x_c * p_c / (2 * hbar)
    values = (mass * omega0 / (np.pi * hbar)) ** 0.25 * np.exp(
        -(mass * omega0 / (2 * hbar)) * (x - x_c) ** 2 + 1j * (p_c * x / hbar + phase)
    )
    return ComplexWavefunction(grid, values, hbar, mass)
