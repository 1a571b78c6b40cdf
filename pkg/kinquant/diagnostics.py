import logging
import warnings
from dataclasses import asdict, dataclass
from typing import Iterable, List, Optional, Tuple

import numpy as np
import pandas as pd

from .config import BOUNDARY_DENSITY_LIMIT, HBAR, MASS
from .entropy_catalog import EntropyModel, d_gamma, drift_ratio, f_antiderivative, kappa_inverse, ln_kappa
from .exceptions import UsageError
from .grid_fields import Grid1D, Grid2D, integrate, plane_wave, spatial_derivative
from .nse_solver import (
    NseScenario,
    NseTrajectory,
    VariableDiffusion,
    constant_diffusion,
    continuity_rate,
    evolve_nse,
)

logger = logging.getLogger(__name__)

__all__ = [
    "DiagnosticsRecord",
    "VariableDiffusion",
    "records_from_table",
    "time_derivative",
    "ehrenfest_residuals",
    "variable_D_residuals",
    "vorticity_2d",
    "eip_vorticity_2d",
    "angular_momentum_2d",
    "gauge_condition_2d",
    "dispersion_check",
    "dispersion_table",
    "stationary_residual",
]


@dataclass
class DiagnosticsRecord:
    """One row of run diagnostics; quantities that do not apply to a run stay NaN."""

    t: float
    norm: float
    x_mean: float = np.nan
    p_mean: float = np.nan
    energy: float = np.nan
    free_energy: float = np.nan
    residual_r1: float = np.nan
    residual_r2: float = np.nan
    residual_r4: float = np.nan
    boundary_density: float = 0.0

    @property
    def is_valid(self) -> bool:
        measured = [self.t, self.norm, self.boundary_density]
        return bool(np.all(np.isfinite(measured)) and self.boundary_density < BOUNDARY_DENSITY_LIMIT)

    def to_dict(self) -> dict:
        return asdict(self)


def records_from_table(table: pd.DataFrame, residuals: Optional[pd.DataFrame] = None) -> List[DiagnosticsRecord]:
    """
    Converts a trajectory table (and optionally an Ehrenfest residual table) into DiagnosticsRecords.

    Args:
        table: Trajectory diagnostics with at least the columns t and norm
        residuals: Output of ehrenfest_residuals, joined on t

    Returns:
        One record per table row
    """
    fields = DiagnosticsRecord.__dataclass_fields__
    merged = table
    if residuals is not None:
        merged = table.merge(residuals[["t", "residual_r1", "residual_r2", "residual_r4"]], on="t", how="left")
    return [
        DiagnosticsRecord(**{key: value for key, value in row.items() if key in fields})
        for row in merged.to_dict("records")
    ]


def time_derivative(t: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Derivative of a sampled time series.

    Uses the five-point centered formula on uniformly spaced samples (second order one-sided values at the
    two end points on each side), and numpy's second order gradient otherwise.

    Args:
        t: Sample times, increasing
        y: Sampled values

    Returns:
        dy/dt at every sample

    Raises:
        UsageError: with fewer than three samples
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    if len(t) < 3 or len(t) != len(y):
        raise UsageError(f"Time derivative needs at least 3 matching samples, got {len(t)}")
    out = np.gradient(y, t, edge_order=2)
    steps = np.diff(t)
    if len(t) >= 5 and np.allclose(steps, steps[0], rtol=1e-9, atol=0):
        h = steps[0]
        out[2:-2] = (-y[4:] + 8 * y[3:-1] - 8 * y[1:-3] + y[:-4]) / (12 * h)
    return out


def _interior(n: int) -> slice:
    return slice(2, n - 2) if n >= 5 else slice(1, n - 1)


def _relative(residual: np.ndarray, reference: np.ndarray) -> np.ndarray:
    scale = max(float(np.max(np.abs(reference))), np.finfo(float).tiny)
    return np.abs(residual) / scale


def _flow_fields(scenario: NseScenario, values: np.ndarray):
    grid, hbar, m = scenario.grid, scenario.hbar, scenario.mass
    rho = np.abs(values) ** 2
    current = hbar * np.imag(np.conj(values) * spatial_derivative(values, grid))
    velocity = current / (m * np.maximum(rho, scenario.model.rho_floor))
    return rho, current, velocity


def ehrenfest_residuals(trajectory: NseTrajectory, scenario: NseScenario) -> pd.DataFrame:
    """
    Residuals of the Ehrenfest relations along a stored trajectory.

    r1 = d<x>/dt - <(gamma / rho) u_drift>, r2 = d<p>/dt - <F_ext> with F_ext = -dV/dx, r4 = dE/dt.
    Time derivatives come from time_derivative on the recorded series; rows at the series ends are dropped.

    Args:
        trajectory: Output of evolve_nse, recorded at least every 10 steps
        scenario: The scenario that produced it

    Returns:
        DataFrame with columns t, dx_dt, velocity_mean, residual_r1, relative_r1, dp_dt, force_mean, residual_r2,
        relative_r2, de_dt, residual_r4, relative_r4, momentum_over_mass

    Raises:
        UsageError: with fewer than three records
    """
    times = trajectory.times
    if len(times) < 3:
        raise UsageError(f"Ehrenfest residuals need at least 3 records, got {len(times)}")
    table = trajectory.table
    force = -spatial_derivative(scenario.potential, scenario.grid)
    velocity_mean, force_mean = [], []
    for values in trajectory.states:
        rho, current, _ = _flow_fields(scenario, values)
        velocity_mean.append(integrate(drift_ratio(scenario.model, rho) * current / scenario.mass, scenario.grid))
        force_mean.append(integrate(rho * force, scenario.grid))
    velocity_mean, force_mean = np.array(velocity_mean), np.array(force_mean)

    dx_dt = time_derivative(times, table["x_mean"].values)
    dp_dt = time_derivative(times, table["p_mean"].values)
    de_dt = time_derivative(times, table["energy"].values)
    r1 = dx_dt - velocity_mean
    r2 = dp_dt - force_mean
    energy_scale = np.maximum(np.abs(table["energy"].values), np.finfo(float).tiny)
    frame = pd.DataFrame(
        {
            "t": times,
            "dx_dt": dx_dt,
            "velocity_mean": velocity_mean,
            "residual_r1": r1,
            "relative_r1": _relative(r1, velocity_mean) if np.any(velocity_mean) else np.abs(r1),
            "dp_dt": dp_dt,
            "force_mean": force_mean,
            "residual_r2": r2,
            "relative_r2": _relative(r2, force_mean) if np.any(force_mean) else np.abs(r2),
            "de_dt": de_dt,
            "residual_r4": de_dt,
            "relative_r4": np.abs(de_dt) / energy_scale,
            "momentum_over_mass": table["p_mean"].values / scenario.mass,
        }
    )
    return frame.iloc[_interior(len(frame))].reset_index(drop=True)


def variable_D_residuals(trajectory: NseTrajectory, scenario: NseScenario) -> pd.DataFrame:
    """
    Ehrenfest relations for a diffusion coefficient D(t, x).

    With A = f(rho) d(ln rho)/dx u_drift the predictions are
    d<x>/dt = <(gamma / rho) u_drift> - <D f d(ln rho)/dx>,
    d<p>/dt = m <A dD/dx> + <F_ext> and dE/dt = -m <A dD/dt>.

    Args:
        trajectory: Output of evolve_nse
        scenario: The scenario that produced it; a constant D is treated as a flat profile

    Returns:
        DataFrame with columns t, dx_dt, x_predicted, residual_x, dp_dt, p_predicted, residual_p, relative_p,
        de_dt, e_predicted, residual_e, relative_e

    Raises:
        ConfigurationError: if the diffusion profile lacks a derivative evaluator
        UsageError: with fewer than three records
    """
    times = trajectory.times
    if len(times) < 3:
        raise UsageError(f"Ehrenfest residuals need at least 3 records, got {len(times)}")
    profile = scenario.diffusion if scenario.variable_diffusion else constant_diffusion(float(scenario.diffusion))
    grid, m, model = scenario.grid, scenario.mass, scenario.model
    x = grid.coordinates
    force = -spatial_derivative(scenario.potential, grid)
    x_pred, p_pred, e_pred = [], [], []
    for t, values in zip(times, trajectory.states):
        rho, current, velocity = _flow_fields(scenario, values)
        grad_big_f = spatial_derivative(f_antiderivative(model, rho), grid)
        # m rho A = f rho' Sigma'
        source = grad_big_f * m * velocity
        x_pred.append(
            integrate(drift_ratio(model, rho) * current / m, grid) - integrate(profile(t, x) * grad_big_f, grid)
        )
        p_pred.append(integrate(source * profile.partial_x(t, x), grid) + integrate(rho * force, grid))
        e_pred.append(-integrate(source * profile.partial_t(t, x), grid))
    x_pred, p_pred, e_pred = np.array(x_pred), np.array(p_pred), np.array(e_pred)

    table = trajectory.table
    dx_dt = time_derivative(times, table["x_mean"].values)
    dp_dt = time_derivative(times, table["p_mean"].values)
    de_dt = time_derivative(times, table["energy"].values)
    frame = pd.DataFrame(
        {
            "t": times,
            "dx_dt": dx_dt,
            "x_predicted": x_pred,
            "residual_x": dx_dt - x_pred,
            "dp_dt": dp_dt,
            "p_predicted": p_pred,
            "residual_p": dp_dt - p_pred,
            "relative_p": _relative(dp_dt - p_pred, p_pred),
            "de_dt": de_dt,
            "e_predicted": e_pred,
            "residual_e": de_dt - e_pred,
            "relative_e": _relative(de_dt - e_pred, e_pred),
        }
    )
    return frame.iloc[_interior(len(frame))].reset_index(drop=True)


def _check_2d(grid, *fields):
    if not isinstance(grid, Grid2D):
        raise UsageError("2D diagnostics need a Grid2D")
    for values in fields:
        if np.ndim(values) != 2 or np.shape(values) != grid.shape:
            raise UsageError(f"Expected a 2D field of shape {grid.shape}, got {np.shape(values)}")


def vorticity_2d(
    rho: np.ndarray, sigma: np.ndarray, model: EntropyModel, grid: Grid2D, mass: float = MASS
) -> np.ndarray:
    """
    Vorticity of the drift velocity field, omega_z = (1/m)[d_x(gamma/rho) d_y Sigma - d_y(gamma/rho) d_x Sigma].

    The diffusive part of the current does not contribute; linear drift is irrotational.

    Args:
        rho: Static 2D density
        sigma: Static 2D phase
        model: Entropy catalog entry
        grid: Grid2D the fields live on
        mass: Particle mass

    Returns:
        omega_z on the grid
    """
    _check_2d(grid, rho, sigma)
    ratio = drift_ratio(model, rho)
    return (
        spatial_derivative(ratio, grid, axis=0) * spatial_derivative(sigma, grid, axis=1)
        - spatial_derivative(ratio, grid, axis=1) * spatial_derivative(sigma, grid, axis=0)
    ) / mass


def eip_vorticity_2d(
    rho: np.ndarray, sigma: np.ndarray, kappa_e: float, grid: Grid2D, mass: float = MASS
) -> np.ndarray:
    """EIP vorticity in closed form, (kappa_e / m)(d_x rho d_y Sigma - d_y rho d_x Sigma)."""
    _check_2d(grid, rho, sigma)
    return (kappa_e / mass) * (
        spatial_derivative(rho, grid, axis=0) * spatial_derivative(sigma, grid, axis=1)
        - spatial_derivative(rho, grid, axis=1) * spatial_derivative(sigma, grid, axis=0)
    )


def angular_momentum_2d(rho: np.ndarray, sigma: np.ndarray, grid: Grid2D) -> float:
    """Static <L> = integral of rho (x d_y Sigma - y d_x Sigma)."""
    _check_2d(grid, rho, sigma)
    x, y = grid.coordinates
    density = rho * (x * spatial_derivative(sigma, grid, axis=1) - y * spatial_derivative(sigma, grid, axis=0))
    return integrate(density, grid)


def gauge_condition_2d(
    diffusion: np.ndarray, rho: np.ndarray, model: EntropyModel, grid: Grid2D, tolerance: float = 1e-8
) -> bool:
    """
    Whether curl(D grad ln kappa(rho)) vanishes, the condition for the gauge transformation to exist in 2D.

    Args:
        diffusion: D(x, y) sampled on the grid (a scalar is broadcast)
        rho: Static 2D density
        model: Entropy catalog entry
        grid: Grid2D
        tolerance: Largest admissible |curl|

    Returns:
        True if the condition holds everywhere
    """
    _check_2d(grid, rho)
    diffusion = np.broadcast_to(np.asarray(diffusion, dtype=float), grid.shape)
    lk = ln_kappa(model, rho)
    curl = spatial_derivative(diffusion * spatial_derivative(lk, grid, axis=1), grid, axis=0) - spatial_derivative(
        diffusion * spatial_derivative(lk, grid, axis=0), grid, axis=1
    )
    worst = float(np.max(np.abs(curl)))
    logger.debug("gauge condition curl max %.3g", worst)
    return worst <= tolerance


def predicted_frequency(
    model: EntropyModel, amplitude: float, wavenumber: float, hbar: float = HBAR, mass: float = MASS
) -> float:
    """Plane-wave frequency (hbar k^2 / 2m) dgamma/drho at rho = A^2."""
    return hbar * wavenumber ** 2 / (2 * mass) * float(d_gamma(model, amplitude ** 2))


def dispersion_check(
    model: EntropyModel,
    amplitude: float,
    wavenumber: float,
    grid: Grid1D,
    diffusion: float = 0.0,
    hbar: float = HBAR,
    mass: float = MASS,
    dt: float = 1e-3,
    t_end: float = 1.0,
    node: int = 0,
) -> Tuple[float, float]:
    """
    Measures the frequency of an evolved plane wave A exp(i k x) and compares it with the dispersion relation.

    The measured value is minus the least-squares slope of the unwrapped phase at one node.

    Args:
        model: Entropy catalog entry
        amplitude: A
        wavenumber: k, admissible on the grid
        grid: Grid1D
        diffusion: Constant D (it does not enter for a uniform density)
        hbar: Reduced Planck constant
        mass: Particle mass
        dt: Time step
        t_end: Length of the run
        node: Grid index whose phase is tracked

    Returns:
        (omega_measured, omega_predicted)
    """
    psi0 = plane_wave(grid, amplitude, wavenumber, hbar, mass)
    scenario = NseScenario(
        model=model,
        grid=grid,
        potential=np.zeros(grid.shape),
        psi0=psi0,
        diffusion=diffusion,
        hbar=hbar,
        mass=mass,
        dt=dt,
        t_end=t_end,
        cadence=1,
        expected_norm=psi0.norm,
    )
    trajectory = evolve_nse(scenario)
    samples = np.array([state[node] for state in trajectory.states])
    phase = np.unwrap(np.angle(samples))
    slope = np.polyfit(trajectory.times, phase, 1)[0]
    drift = float(np.max(np.abs(trajectory.densities - amplitude ** 2))) / amplitude ** 2
    if drift > 1e-6:
        warnings.warn(f"Plane wave amplitude drifted by {drift:.3g}; the measured frequency may be biased")
    predicted = predicted_frequency(model, amplitude, wavenumber, hbar, mass)
    return float(-slope), predicted


def dispersion_table(
    model: EntropyModel, rows: Iterable[Tuple[float, float]], grid: Grid1D, **kwargs
) -> pd.DataFrame:
    """
    Runs dispersion_check for every (amplitude, wavenumber) pair.

    Returns:
        DataFrame with columns k, amplitude, omega_measured, omega_predicted, relative_error
    """
    records = []
    for amplitude, wavenumber in rows:
        measured, predicted = dispersion_check(model, amplitude, wavenumber, grid, **kwargs)
        records.append(
            {
                "k": wavenumber,
                "amplitude": amplitude,
                "omega_measured": measured,
                "omega_predicted": predicted,
                "relative_error": abs(measured - predicted) / abs(predicted),
            }
        )
    return pd.DataFrame(records)


def stationary_residual(
    model: EntropyModel,
    sigma_s: np.ndarray,
    diffusion: float,
    beta_prime: float,
    grid: Grid1D,
    mass: float = MASS,
) -> Tuple[np.ndarray, float]:
    """
    Builds rho_s = kappa^-1(exp(Sigma_s / (m D) - beta')) and evaluates the continuity equation on (rho_s, Sigma_s).

    Args:
        model: Entropy catalog entry
        sigma_s: Stationary phase on the grid
        diffusion: D > 0
        beta_prime: Normalization constant
        grid: Grid1D
        mass: Particle mass

    Returns:
        (rho_s, max |drho/dt|)
    """
    if not diffusion > 0:
        raise UsageError(f"Stationary construction needs D > 0, got {diffusion}")
    sigma_s = np.asarray(sigma_s, dtype=float)
    rho_s = kappa_inverse(model, np.exp(sigma_s / (mass * diffusion) - beta_prime), clip_to_support=True)
    velocity = spatial_derivative(sigma_s, grid) / mass
    rate = continuity_rate(model, rho_s, velocity, diffusion, grid)
    return rho_s, float(np.max(np.abs(rate)))
