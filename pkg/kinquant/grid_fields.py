import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Optional, Tuple, Union

import numpy as np
import pandas as pd

from .config import HBAR, MASS, MIN_GRID_POINTS, RHO_FLOOR, TWO_PI
from .exceptions import ConfigurationError, DecompositionError, UsageError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grid1D:
    """
    Uniform periodic mesh on [-length / 2, length / 2).

    Args:
        n_points: Number of nodes (at least 16)
        length: Extent of the periodic box
    """

    n_points: int
    length: float

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < MIN_GRID_POINTS:
            raise ConfigurationError(
                f"n_points must be an integer >= {MIN_GRID_POINTS}, got {self.n_points}"
            )
        if not self.length > 0:
            raise ConfigurationError(f"length must be positive, got {self.length}")

    @property
    def ndim(self) -> int:
        return 1

    @property
    def spacing(self) -> float:
        return self.length / self.n_points

    @property
    def cell_area(self) -> float:
        return self.spacing

    @property
    def shape(self) -> Tuple[int]:
        return (self.n_points,)

    @cached_property
    def coordinates(self) -> np.ndarray:
        return -0.5 * self.length + self.spacing * np.arange(self.n_points)

    def wavenumber(self, mode: int) -> float:
        """Admissible wavenumber 2 pi mode / length."""
        return TWO_PI * mode / self.length

    def nearest_mode(self, k: float) -> int:
        return int(np.round(k * self.length / TWO_PI))

    def is_admissible(self, k: float, rtol: float = 1e-9) -> bool:
        """Whether exp(i k x) is periodic on the box."""
        return abs(self.wavenumber(self.nearest_mode(k)) - k) <= rtol * max(1.0, abs(k))


@dataclass(frozen=True)
class Grid2D:
    """
    Uniform periodic 2D mesh, used only for static diagnostics. Arrays are indexed [ix, iy].

    Args:
        nx: Nodes along x
        ny: Nodes along y
        length_x: Extent along x
        length_y: Extent along y
    """

    nx: int
    ny: int
    length_x: float
    length_y: float

    def __post_init__(self):
        for n in (self.nx, self.ny):
            if int(n) != n or n < MIN_GRID_POINTS:
                raise ConfigurationError(f"Grid2D needs at least {MIN_GRID_POINTS} nodes per axis, got {n}")
        if not (self.length_x > 0 and self.length_y > 0):
            raise ConfigurationError("Grid2D lengths must be positive")

    @property
    def ndim(self) -> int:
        return 2

    @property
    def spacings(self) -> Tuple[float, float]:
        return self.length_x / self.nx, self.length_y / self.ny

    @property
    def cell_area(self) -> float:
        dx, dy = self.spacings
        return dx * dy

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.nx, self.ny)

    @cached_property
    def coordinates(self) -> Tuple[np.ndarray, np.ndarray]:
        dx, dy = self.spacings
        x = -0.5 * self.length_x + dx * np.arange(self.nx)
        y = -0.5 * self.length_y + dy * np.arange(self.ny)
        return np.meshgrid(x, y, indexing="ij")


Grid = Union[Grid1D, Grid2D]


@dataclass
class ComplexWavefunction:
    """Wavefunction samples on a grid together with the constants of its evolution equation."""

    grid: Grid
    values: np.ndarray
    hbar: float = HBAR
    mass: float = MASS

    def __post_init__(self):
        self.values = np.asarray(self.values, dtype=complex)
        if self.values.shape != self.grid.shape:
            raise UsageError(f"Wavefunction shape {self.values.shape} does not match grid {self.grid.shape}")
        if not np.all(np.isfinite(self.values)):
            raise UsageError("Wavefunction contains non-finite values")

    @property
    def density(self) -> np.ndarray:
        return np.abs(self.values) ** 2

    @property
    def norm(self) -> float:
        return integrate(self.density, self.grid)

    def with_values(self, values: np.ndarray) -> "ComplexWavefunction":
        return ComplexWavefunction(self.grid, values, self.hbar, self.mass)


@dataclass
class HydroPair:
    """
    Density and continuous phase (units of action) of a quantum state.

    Args:
        grid: Mesh the fields live on
        rho: Non-negative density
        sigma_phase: Unwrapped phase Sigma, psi = sqrt(rho) exp(i Sigma / hbar)
        hbar: Reduced Planck constant of the evolution
        mass: Particle mass
    """

    grid: Grid
    rho: np.ndarray
    sigma_phase: np.ndarray
    hbar: float = HBAR
    mass: float = MASS

    def __post_init__(self):
        self.rho = np.asarray(self.rho, dtype=float)
        self.sigma_phase = np.asarray(self.sigma_phase, dtype=float)
        if self.rho.shape != self.grid.shape or self.sigma_phase.shape != self.grid.shape:
            raise UsageError("HydroPair fields must match the grid shape")

    @property
    def phase_period(self) -> float:
        return TWO_PI * self.hbar


def _shifted_difference(
    values: np.ndarray, shift: int, axis: int, period: Optional[float]
) -> np.ndarray:
    diff = np.roll(values, -shift, axis=axis) - values
    if period is not None:
        diff = diff - period * np.round(diff / period)
    return diff


def spatial_derivative(
    values: np.ndarray,
    grid: Grid,
    order: int = 1,
    axis: int = 0,
    period: Optional[float] = None,
) -> np.ndarray:
    """
    Fourth-order central finite difference with periodic wrap.

    Args:
        values: Real or complex samples on the grid
        grid: Grid1D or Grid2D the samples live on
        order: 1 for the gradient component, 2 for the second derivative
        axis: Axis to differentiate along (Grid2D only)
        period: If given, node differences are wrapped into (-period / 2, period / 2], so a phase
         stored modulo period differentiates without unwrapping

    Returns:
        Derivative samples, same shape as values

    Example:
        >>> grid = Grid1D(256, 20.0)
        >>> x = grid.coordinates
        >>> d = spatial_derivative(np.sin(2 * np.pi * x / 20), grid)
    """
    if order not in (1, 2):
        raise UsageError(f"Derivative order must be 1 or 2, got {order}")
    if grid.ndim == 1:
        if axis != 0:
            raise UsageError("Grid1D fields only have axis 0")
        h = grid.spacing
    else:
        h = grid.spacings[axis]
    values = np.asarray(values)
    d_p1 = _shifted_difference(values, 1, axis, period)
    d_m1 = _shifted_difference(values, -1, axis, period)
    d_p2 = _shifted_difference(values, 2, axis, period)
    d_m2 = _shifted_difference(values, -2, axis, period)
    if order == 1:
        return (8 * (d_p1 - d_m1) - (d_p2 - d_m2)) / (12 * h)
    return (16 * (d_p1 + d_m1) - (d_p2 + d_m2)) / (12 * h ** 2)


def laplacian(values: np.ndarray, grid: Grid) -> np.ndarray:
    if grid.ndim == 1:
        return spatial_derivative(values, grid, 2)
    return spatial_derivative(values, grid, 2, axis=0) + spatial_derivative(values, grid, 2, axis=1)


def integrate(values: np.ndarray, grid: Grid) -> Union[float, complex]:
    """
    Riemann sum over the periodic grid, which is the trapezoid rule for periodic samples.

    Args:
        values: Field samples
        grid: Grid the samples live on

    Returns:
        Integral of the field over the box
    """
    total = np.sum(values) * grid.cell_area
    return complex(total) if np.iscomplexobj(total) else float(total)


def expectation(rho: np.ndarray, values: np.ndarray, grid: Grid) -> float:
    """Density-weighted integral of values."""
    return integrate(rho * values, grid)


def l2_distance(a: np.ndarray, b: np.ndarray, grid: Grid) -> float:
    return float(np.sqrt(integrate(np.abs(a - b) ** 2, grid)))


def boundary_density(rho: np.ndarray, width: int = 2) -> float:
    """Largest density within width nodes of the box edges."""
    rho = np.asarray(rho)
    return float(max(np.max(rho[:width]), np.max(rho[-width:])))


def _support_gap_location(rho: np.ndarray, support: np.ndarray, grid: Grid1D) -> Optional[float]:
    if support.all():
        return None
    starts = np.flatnonzero(support & ~np.roll(support, 1))
    if len(starts) <= 1:
        return None
    gap_starts = np.flatnonzero(~support & np.roll(support, 1))
    n = len(rho)
    for start in gap_starts:
        stop = start
        while not support[stop % n]:
            stop += 1
        members = np.arange(start, stop) % n
        if 0 in members or n - 1 in members:
            continue
        node = members[np.argmin(rho[members])]
        return float(grid.coordinates[node])
    return float(grid.coordinates[gap_starts[0]])


def polar_decompose(psi: ComplexWavefunction, rho_floor: float = RHO_FLOOR) -> HydroPair:
    """
    Splits a 1D wavefunction into density and continuous phase.

    The phase is the line integral of the discrete phase increments arg(psi_{i+1} psi_i^*), started from
    the node of maximal density and run in both directions, so the only discontinuity sits at the box edge.

    Args:
        psi: Wavefunction on a Grid1D
        rho_floor: Density below which a node inside the support counts as a nodal point

    Returns:
        HydroPair with rho = |psi|^2

    Raises:
        DecompositionError: if the density support is split by a node
    """
    if psi.grid.ndim != 1:
        raise UsageError("polar_decompose works on Grid1D wavefunctions")
    rho = psi.density
    support = rho >= rho_floor
    if not support.any():
        raise DecompositionError("Wavefunction vanishes on the whole grid", float(psi.grid.coordinates[0]))
    location = _support_gap_location(rho, support, psi.grid)
    if location is not None:
        raise DecompositionError("Node inside the density support", location)

    values = psi.values
    increments = np.angle(values[1:] * np.conj(values[:-1]))
    cumulative = np.concatenate([[0.0], np.cumsum(increments)])
    anchor = int(np.argmax(rho))
    phase = np.angle(values[anchor]) + cumulative - cumulative[anchor]
    return HydroPair(psi.grid, rho, psi.hbar * phase, psi.hbar, psi.mass)


def polar_compose(h: HydroPair) -> ComplexWavefunction:
    """psi = sqrt(rho) exp(i Sigma / hbar)."""
    values = np.sqrt(np.maximum(h.rho, 0.0)) * np.exp(1j * h.sigma_phase / h.hbar)
    return ComplexWavefunction(h.grid, values, h.hbar, h.mass)


def phase_gradient(psi: ComplexWavefunction, rho_floor: float = RHO_FLOOR) -> np.ndarray:
    """Gradient of the phase, hbar Im(psi^* d psi) / rho, without unwrapping."""
    d_psi = spatial_derivative(psi.values, psi.grid, 1)
    return psi.hbar * np.imag(np.conj(psi.values) * d_psi) / np.maximum(psi.density, rho_floor)


def hydro_phase_gradient(h: HydroPair, order: int = 1) -> np.ndarray:
    """Derivative of the stored phase Sigma, robust to 2 pi hbar jumps."""
    return spatial_derivative(h.sigma_phase, h.grid, order, period=h.phase_period)


def quantum_potential(
    rho: np.ndarray,
    grid: Grid1D,
    hbar: float = HBAR,
    mass: float = MASS,
    rho_floor: float = RHO_FLOOR,
) -> np.ndarray:
    """
    Bohm quantum potential -(hbar^2 / 2m) Laplacian(sqrt(rho)) / sqrt(rho).

    Args:
        rho: Density samples
        grid: Grid1D the density lives on
        hbar: Reduced Planck constant
        mass: Particle mass
        rho_floor: Lower bound for the density in the denominator

    Returns:
        Quantum potential samples
    """
    amplitude = np.sqrt(np.maximum(rho, 0.0))
    return -(hbar ** 2 / (2 * mass)) * laplacian(amplitude, grid) / np.sqrt(np.maximum(rho, rho_floor))


def gaussian_packet(
    grid: Grid1D,
    center: float = 0.0,
    width: float = 1.0,
    boost: float = 0.0,
    hbar: float = HBAR,
    mass: float = MASS,
    chirp: float = 0.0,
) -> ComplexWavefunction:
    """
    Normalized Gaussian wave packet whose density has standard deviation width and mean wavenumber boost.

    Args:
        grid: Grid1D to sample on
        center: Packet center
        width: Standard deviation of |psi|^2
        boost: Carrier wavenumber k0, psi ~ exp(i k0 x)
        hbar: Reduced Planck constant
        mass: Particle mass
        chirp: Quadratic phase coefficient c, psi ~ exp(i c (x - center)^2)

    Returns:
        The sampled packet, renormalized on the grid
    """
    x = grid.coordinates
    values = np.exp(-((x - center) ** 2) / (4 * width ** 2) + 1j * (boost * x + chirp * (x - center) ** 2))
    values = values / np.sqrt(integrate(np.abs(values) ** 2, grid))
    return ComplexWavefunction(grid, values, hbar, mass)


def plane_wave(
    grid: Grid1D,
    amplitude: float,
    wavenumber: float,
    hbar: float = HBAR,
    mass: float = MASS,
) -> ComplexWavefunction:
    """A exp(i k x); k must be admissible on the grid."""
    if not grid.is_admissible(wavenumber):
        mode = grid.nearest_mode(wavenumber)
        raise ConfigurationError(
            f"Wavenumber {wavenumber:g} is not of the form 2 pi j / L; "
            f"nearest admissible is {grid.wavenumber(mode):.12g}"
        )
    values = amplitude * np.exp(1j * wavenumber * grid.coordinates)
    return ComplexWavefunction(grid, values, hbar, mass)


def snapshot_table(state: Union[ComplexWavefunction, HydroPair], rho_floor: float = RHO_FLOOR) -> pd.DataFrame:
    """
    Field snapshot with one row per node.

    Args:
        state: Wavefunction or hydrodynamic pair on a Grid1D
        rho_floor: Node threshold used if the phase must be reconstructed

    Returns:
        pandas DataFrame with columns x, re_psi, im_psi, rho, sigma
    """
    if isinstance(state, HydroPair):
        hydro = state
        psi = polar_compose(state)
    else:
        psi = state
        hydro = polar_decompose(state, rho_floor)
    return pd.DataFrame(
        {
            "x": psi.grid.coordinates,
            "re_psi": psi.values.real,
            "im_psi": psi.values.imag,
            "rho": hydro.rho,
            "sigma": hydro.sigma_phase,
        }
    )


def harmonic_potential(grid: Grid1D, omega0: float = 1.0, mass: float = MASS) -> np.ndarray:
    """V(x) = m omega0^2 x^2 / 2."""
    return 0.5 * mass * omega0 ** 2 * grid.coordinates ** 2


def polynomial_potential(grid: Grid1D, coeffs) -> np.ndarray:
    """V(x) = sum_n c_n x^n, coefficients in increasing order."""
    if len(coeffs) == 0:
        return np.zeros(grid.shape)
    return np.polynomial.polynomial.polyval(grid.coordinates, np.asarray(coeffs, dtype=float))
