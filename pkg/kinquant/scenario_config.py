import configparser
import hashlib
import logging
from dataclasses import asdict, dataclass, fields
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from .config import (
    DIFFUSION_PROFILES,
    FREE_ENERGY_METHODS,
    INITIAL_KINDS,
    POTENTIAL_KINDS,
    REPRESENTATIONS,
    SCENARIO_KINDS,
    SCENARIO_SCHEMA,
)
from .entropy_catalog import EntropyModel, make_model, non_monotonic_subinterval
from .exceptions import DecompositionError, KinquantError, ScenarioValidationError
from .grid_fields import (
    ComplexWavefunction,
    Grid1D,
    gaussian_packet,
    harmonic_potential,
    integrate,
    plane_wave,
    polynomial_potential,
)
from .nfpe_solver import NfpeScenario, equilibrium_density
from .nfpe_solver import stable_time_step as nfpe_stable_time_step
from .nse_solver import NseScenario, make_diffusion, well_posedness_ratio
from .nse_solver import stable_time_step as nse_stable_time_step

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ModelSpec:
    variant: str
    deformation: float
    r: float
    q: float
    kappa_e: float
    drift: str
    rho_floor: float


@dataclass(frozen=True)
class GridSpec:
    n_points: int
    length: float


@dataclass(frozen=True)
class PhysicsSpec:
    hbar: float
    mass: float
    diffusion: float
    beta: float
    g_coeffs: Tuple[float, ...]
    diffusion_profile: str
    diffusion_epsilon: float


@dataclass(frozen=True)
class PotentialSpec:
    kind: str
    omega0: float
    coeffs: Tuple[float, ...]


@dataclass(frozen=True)
class InitialSpec:
    kind: str
    center: float
    width: float
    boost: float
    amplitude: float
    wavenumber: float
    wavenumbers: Tuple[float, ...]


@dataclass(frozen=True)
class IntegratorSpec:
    kind: str
    dt: float
    t_end: float
    cadence: int
    representation: str
    drop_potential_difference: bool
    free_energy_method: str
    stability_factor: float
    norm_drift_limit: float


@dataclass(frozen=True)
class OutputSpec:
    directory: str
    prefix: str
    snapshot_times: Tuple[float, ...]


SECTION_TYPES = {
    "model": ModelSpec,
    "grid": GridSpec,
    "physics": PhysicsSpec,
    "potential": PotentialSpec,
    "initial": InitialSpec,
    "integrator": IntegratorSpec,
    "output": OutputSpec,
}


@dataclass(frozen=True)
class Scenario:
    """
    Fully validated scenario: one typed spec per file section.

    A Scenario is immutable; every default of the schema has been applied, so serialize_scenario writes a
    self-describing file.
    """

    model: ModelSpec
    grid: GridSpec
    physics: PhysicsSpec
    potential: PotentialSpec
    initial: InitialSpec
    integrator: IntegratorSpec
    output: OutputSpec

    @property
    def kind(self) -> str:
        return self.integrator.kind


def _key_type(section: str, key: str) -> type:
    default = SCENARIO_SCHEMA[section][key]
    if default is None:
        return str
    return type(default)


def _coerce(raw: str, kind: type) -> Any:
    raw = raw.strip()
    if kind is bool:
        lowered = raw.lower()
        if lowered not in configparser.ConfigParser.BOOLEAN_STATES:
            raise ValueError(f"'{raw}' is not a boolean")
        return configparser.ConfigParser.BOOLEAN_STATES[lowered]
    if kind is int:
        return int(raw)
    if kind is float:
        return float(raw)
    if kind is tuple:
        if not raw:
            return ()
        return tuple(float(item) for item in raw.split(","))
    return raw


def _format(value: Any) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, tuple):
        return ", ".join(repr(float(item)) for item in value)
    return str(value)


def _read_sections(text: str, errors: List[str]) -> Dict[str, Dict[str, Any]]:
    parser = configparser.ConfigParser(interpolation=None, strict=True)
    try:
        parser.read_string(text)
    except configparser.Error as err:
        raise ScenarioValidationError([f"Malformed scenario file: {err}"]) from err
    if parser.defaults():
        errors.append("A [DEFAULT] section is not supported; write every key in its own section")

    for section in parser.sections():
        if section not in SCENARIO_SCHEMA:
            errors.append(f"Unknown section [{section}], expected one of {list(SCENARIO_SCHEMA)}")

    values = {}
    for section, schema in SCENARIO_SCHEMA.items():
        present = dict(parser.items(section, raw=True)) if parser.has_section(section) else {}
        for key in present:
            if key not in schema and key not in parser.defaults():
                errors.append(f"Unknown key '{key}' in [{section}]")
        values[section] = {}
        for key, default in schema.items():
            if key not in present:
                if default is None:
                    errors.append(f"Missing required key '{key}' in [{section}]")
                values[section][key] = default
                continue
            try:
                values[section][key] = _coerce(present[key], _key_type(section, key))
            except ValueError:
                errors.append(
                    f"[{section}] {key} = '{present[key]}' is not a valid {_key_type(section, key).__name__}"
                )
                values[section][key] = default
    return values


def _check_vocabularies(values: Dict[str, Dict[str, Any]], errors: List[str]) -> None:
    vocabularies = [
        ("integrator", "kind", SCENARIO_KINDS),
        ("integrator", "representation", REPRESENTATIONS),
        ("integrator", "free_energy_method", FREE_ENERGY_METHODS),
        ("potential", "kind", POTENTIAL_KINDS),
        ("initial", "kind", INITIAL_KINDS),
        ("physics", "diffusion_profile", DIFFUSION_PROFILES),
    ]
    for section, key, options in vocabularies:
        value = values[section][key]
        if value is not None and value not in options:
            errors.append(f"Unknown {section} {key} '{value}', expected one of {options}")

    positive = [
        ("grid", "length"),
        ("physics", "hbar"),
        ("physics", "mass"),
        ("physics", "beta"),
        ("integrator", "dt"),
        ("integrator", "t_end"),
        ("integrator", "stability_factor"),
        ("integrator", "norm_drift_limit"),
        ("initial", "width"),
        ("initial", "amplitude"),
    ]
    for section, key in positive:
        if not values[section][key] > 0:
            errors.append(f"[{section}] {key} must be positive, got {values[section][key]}")
    if values["physics"]["diffusion"] < 0:
        errors.append(f"[physics] diffusion must be non-negative, got {values['physics']['diffusion']}")
    if values["integrator"]["cadence"] < 1:
        errors.append(f"[integrator] cadence must be at least 1, got {values['integrator']['cadence']}")


def _suggest_dt(bound: float) -> float:
    """Two significant digits, rounded down so the suggestion honors the bound."""
    exponent = np.floor(np.log10(bound)) - 1
    return float(np.floor(bound / 10 ** exponent) * 10 ** exponent)


def _check_wavenumbers(scenario: Scenario, grid: Grid1D, errors: List[str]) -> None:
    wavenumbers = (scenario.initial.wavenumber,)
    if scenario.kind == "dispersion":
        wavenumbers = dispersion_wavenumbers(scenario)
    for k in wavenumbers:
        if not grid.is_admissible(k):
            nearest = grid.wavenumber(grid.nearest_mode(k))
            errors.append(
                f"Wavenumber {k:g} is not of the form 2 pi j / L on a box of length {grid.length:g}; "
                f"nearest admissible k is {nearest:.12g}"
            )


def _check_monotonic(model: EntropyModel, rho: np.ndarray, errors: List[str]) -> None:
    occupied = rho[rho >= model.rho_floor]
    if occupied.size == 0:
        return
    offending = non_monotonic_subinterval(model, float(np.min(occupied)), float(np.max(occupied)))
    if offending is not None:
        errors.append(
            f"{model.label} is not monotonic for densities in [{offending[0]:.6g}, {offending[1]:.6g}] "
            f"reached by the initial state (admissible interval {model.monotonic_range})"
        )


def _check_stability(scenario: Scenario, errors: List[str]) -> None:
    dt = scenario.integrator.dt
    if scenario.kind == "nfpe":
        bound = nfpe_stable_time_step(build_nfpe_scenario(scenario))
    else:
        nse = build_nse_scenario(scenario)
        ratio = well_posedness_ratio(nse)
        if ratio >= 1:
            errors.append(
                f"2 m D f(rho) / hbar reaches {ratio:.3g} on the initial support; the evolution needs it below 1"
            )
        bound = nse_stable_time_step(nse)
    if dt > bound:
        errors.append(
            f"dt = {dt:g} exceeds the stability bound {bound:.6g}; suggested dt = {_suggest_dt(bound):g}"
        )


def _validate(scenario: Scenario, errors: List[str]) -> None:
    model = grid = None
    try:
        model = build_model(scenario)
    except KinquantError as err:
        errors.append(str(err))
    try:
        grid = build_grid(scenario)
    except KinquantError as err:
        errors.append(str(err))
    if model is None or grid is None:
        return
    potential = build_potential(scenario, grid)
    if scenario.kind == "catalog_dump":
        return
    if scenario.kind == "dispersion" or scenario.initial.kind == "plane_wave":
        before = len(errors)
        _check_wavenumbers(scenario, grid, errors)
        if len(errors) > before:
            return
    if scenario.kind == "nfpe" and not scenario.physics.diffusion > 0:
        errors.append("NFPE scenarios need a positive diffusion")
        return
    try:
        rho0 = initial_density(scenario, model, grid, potential)
    except KinquantError as err:
        errors.append(f"Cannot build the initial state: {err}")
        return
    before = len(errors)
    _check_monotonic(model, rho0, errors)
    if len(errors) > before:
        return
    try:
        _check_stability(scenario, errors)
    except DecompositionError as err:
        errors.append(f"Initial wavefunction has a node inside its support: {err}")
    except KinquantError as err:
        errors.append(str(err))


def parse_scenario(text: str) -> Scenario:
    """
    Parses and validates a scenario file.

    Args:
        text: UTF-8 text with [section] key = value lines

    Returns:
        Scenario with every default applied

    Raises:
        ScenarioValidationError: carrying every problem found, not only the first

    Example:
        >>> parse_scenario("[model]\\nvariant = bg\\n[integrator]\\nkind = nse\\n").physics.diffusion
        0.1
    """
    errors: List[str] = []
    values = _read_sections(text, errors)
    _check_vocabularies(values, errors)
    if errors:
        raise ScenarioValidationError(errors)

    scenario = Scenario(**{name: SECTION_TYPES[name](**values[name]) for name in SCENARIO_SCHEMA})
    _validate(scenario, errors)
    if errors:
        raise ScenarioValidationError(errors)
    logger.info("parsed %s scenario for %s", scenario.kind, scenario.model.variant)
    return scenario


def try_parse_scenario(text: str) -> Tuple[Optional[Scenario], List[str]]:
    """Total variant of parse_scenario: (scenario, []) or (None, errors)."""
    try:
        return parse_scenario(text), []
    except ScenarioValidationError as err:
        return None, err.errors


def load_scenario(path: Union[str, Path]) -> Scenario:
    return parse_scenario(Path(path).read_text(encoding="utf-8"))


def serialize_scenario(scenario: Scenario) -> str:
    """Normalized text form with every key written out; parse_scenario(serialize_scenario(s)) == s."""
    lines = []
    for name in SCENARIO_SCHEMA:
        spec = getattr(scenario, name)
        lines.append(f"[{name}]")
        for item in fields(spec):
            lines.append(f"{item.name} = {_format(getattr(spec, item.name))}")
        lines.append("")
    return "\n".join(lines)


def scenario_hash(scenario: Scenario) -> str:
    """SHA-256 of the normalized serialized form."""
    return hashlib.sha256(serialize_scenario(scenario).encode("utf-8")).hexdigest()


def build_model(scenario: Scenario) -> EntropyModel:
    return make_model(**asdict(scenario.model))


def build_grid(scenario: Scenario) -> Grid1D:
    return Grid1D(scenario.grid.n_points, scenario.grid.length)


def build_potential(scenario: Scenario, grid: Grid1D) -> np.ndarray:
    spec = scenario.potential
    if spec.kind == "harmonic":
        return harmonic_potential(grid, spec.omega0, scenario.physics.mass)
    if spec.kind == "polynomial":
        return polynomial_potential(grid, spec.coeffs)
    return np.zeros(grid.shape)


def build_diffusion(scenario: Scenario):
    physics = scenario.physics
    return make_diffusion(physics.diffusion_profile, physics.diffusion, physics.diffusion_epsilon)


def dispersion_wavenumbers(scenario: Scenario) -> Tuple[float, ...]:
    """Wavenumbers listed in [initial] wavenumbers, falling back to the single [initial] wavenumber."""
    return scenario.initial.wavenumbers or (scenario.initial.wavenumber,)


def initial_wavefunction(
    scenario: Scenario,
    model: EntropyModel,
    grid: Grid1D,
    potential: np.ndarray,
) -> ComplexWavefunction:
    """Initial psi: Gaussian packet, plane wave A exp(i k x) or the real root of the NFPE equilibrium.

    Dispersion scenarios always start from a plane wave at the first listed wavenumber.
    """
    spec, physics = scenario.initial, scenario.physics
    if scenario.kind == "dispersion":
        k = dispersion_wavenumbers(scenario)[0]
        return plane_wave(grid, spec.amplitude, k, physics.hbar, physics.mass)
    if spec.kind == "plane_wave":
        return plane_wave(grid, spec.amplitude, spec.wavenumber, physics.hbar, physics.mass)
    if spec.kind == "equilibrium":
        rho_eq, _ = equilibrium_density(model, potential, physics.beta, grid)
        return ComplexWavefunction(grid, np.sqrt(rho_eq).astype(complex), physics.hbar, physics.mass)
    return gaussian_packet(grid, spec.center, spec.width, spec.boost, physics.hbar, physics.mass)


def initial_density(
    scenario: Scenario,
    model: EntropyModel,
    grid: Grid1D,
    potential: np.ndarray,
) -> np.ndarray:
    """Initial rho; for NFPE runs a plane wave means the uniform density 1 / L."""
    if scenario.kind == "nfpe":
        if scenario.initial.kind == "plane_wave":
            return np.full(grid.shape, 1.0 / grid.length)
        if scenario.initial.kind == "equilibrium":
            return equilibrium_density(model, potential, scenario.physics.beta, grid)[0]
    return initial_wavefunction(scenario, model, grid, potential).density


def build_nfpe_scenario(scenario: Scenario) -> NfpeScenario:
    model, grid = build_model(scenario), build_grid(scenario)
    potential = build_potential(scenario, grid)
    return NfpeScenario(
        model=model,
        grid=grid,
        potential=potential,
        rho0=initial_density(scenario, model, grid, potential),
        diffusion=scenario.physics.diffusion,
        beta=scenario.physics.beta,
        dt=scenario.integrator.dt,
        t_end=scenario.integrator.t_end,
        cadence=scenario.integrator.cadence,
        free_energy_method=scenario.integrator.free_energy_method,
        stability_factor=scenario.integrator.stability_factor,
        norm_drift_limit=scenario.integrator.norm_drift_limit,
    )


def build_nse_scenario(scenario: Scenario, psi0: Optional[ComplexWavefunction] = None) -> NseScenario:
    """
    NseScenario for nse, gauge_check and dispersion runs.

    Args:
        scenario: Parsed scenario
        psi0: Overrides the initial state of the file (used for the dispersion wavenumber sweep)
    """
    model, grid = build_model(scenario), build_grid(scenario)
    potential = build_potential(scenario, grid)
    if psi0 is None:
        psi0 = initial_wavefunction(scenario, model, grid, potential)
    return NseScenario(
        model=model,
        grid=grid,
        potential=potential,
        psi0=psi0,
        diffusion=build_diffusion(scenario),
        g_coeffs=scenario.physics.g_coeffs,
        hbar=scenario.physics.hbar,
        mass=scenario.physics.mass,
        dt=scenario.integrator.dt,
        t_end=scenario.integrator.t_end,
        cadence=scenario.integrator.cadence,
        representation=scenario.integrator.representation,
        stability_factor=scenario.integrator.stability_factor,
        norm_drift_limit=scenario.integrator.norm_drift_limit,
        expected_norm=float(integrate(psi0.density, grid)),
    )
