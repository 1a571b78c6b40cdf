"""
Command-line entry point.

    kinquant <subcommand> --scenario FILE --out DIR [--seed N] [--tolerance-scale F] [--workers N] [--verbose]

Exit codes: 0 success, 1 invalid scenario or usage, 2 numerical failure, 3 acceptance failure.
"""
import argparse
import logging
import sys
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable, Dict, List, Optional

import numpy as np
import pandas as pd

from .acceptance import run_suite, suite_table
from .config import CATALOG_POINTS, CATALOG_RHO_MAX, CATALOG_RHO_MIN, SCENARIO_KINDS
from .data_utils import file_sha256, write_manifest, write_table
from .diagnostics import dispersion_table, ehrenfest_residuals, variable_D_residuals
from .entropy_catalog import catalog_table
from .exceptions import (
    AcceptanceError,
    ConfigurationError,
    DecompositionError,
    DomainError,
    IntegrationError,
    KinquantError,
    RangeError,
    UsageError,
)
from .gauge import dg_chain, paired_evolution
from .grid_fields import snapshot_table
from .nfpe_solver import evolve_nfpe
from .nse_solver import evolve_nse
from .scenario_config import (
    Scenario,
    build_grid,
    build_model,
    build_nfpe_scenario,
    build_nse_scenario,
    dispersion_wavenumbers,
    load_scenario,
    scenario_hash,
    serialize_scenario,
)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_VALIDATION = 1
EXIT_NUMERICAL = 2
EXIT_ACCEPTANCE = 3

# subcommand -> scenario kinds it accepts
SUBCOMMAND_KINDS = {
    "nfpe-relax": ["nfpe"],
    "nse-evolve": ["nse"],
    "gauge-check": ["gauge_check", "nse"],
    "dg-linearize": ["gauge_check", "nse"],
    "dispersion": ["dispersion"],
    "catalog": SCENARIO_KINDS,
}


@dataclass
class RunManifest:
    """
    Record of one CLI run, written as manifest.json next to the data files.

    Only the manifest carries wall-clock timestamps, so the CSV files of two runs of the same scenario and
    seed are byte-identical.
    """

    subcommand: str
    scenario_hash: Optional[str]
    seed: int
    started: str
    finished: str = ""
    files: List[str] = field(default_factory=list)
    file_hashes: Dict[str, str] = field(default_factory=dict)
    summary: Dict[str, float] = field(default_factory=dict)
    checks: Dict[str, bool] = field(default_factory=dict)
    exit_code: int = EXIT_OK

    def add_file(self, path: Path) -> None:
        self.files.append(path.name)
        self.file_hashes[path.name] = file_sha256(path)

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def _timestamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


class RunContext:
    """Output directory, table metadata and the manifest under construction for one run."""

    def __init__(self, subcommand: str, scenario: Optional[Scenario], out_dir: Path, seed: int):
        self.scenario = scenario
        self.out_dir = out_dir
        self.prefix = scenario.output.prefix if scenario is not None else "verify"
        digest = scenario_hash(scenario) if scenario is not None else None
        self.manifest = RunManifest(subcommand, digest, seed, _timestamp())
        self.metadata = {"subcommand": subcommand, "scenario_hash": digest, "seed": seed}
        if scenario is not None:
            self.metadata["model"] = build_model(scenario).label

    def write(self, name: str, data: pd.DataFrame) -> Path:
        path = write_table(data, self.out_dir / f"{self.prefix}_{name}.csv", self.metadata)
        self.manifest.add_file(path)
        return path

    def summarize(self, **values) -> None:
        self.manifest.summary.update({key: float(value) for key, value in values.items()})

    def finish(self, exit_code: int) -> Path:
        if self.scenario is not None:
            path = self.out_dir / f"{self.prefix}_scenario.ini"
            path.write_text(serialize_scenario(self.scenario), encoding="utf-8")
            self.manifest.add_file(path)
        self.manifest.exit_code = exit_code
        self.manifest.finished = _timestamp()
        return write_manifest(self.manifest.to_dict(), self.out_dir / "manifest.json")


def _snapshot_indices(times: np.ndarray, requested) -> List[int]:
    if not requested:
        return [0, len(times) - 1]
    return sorted({int(np.argmin(np.abs(times - t))) for t in requested})


def run_nfpe_relax(context: RunContext, args: argparse.Namespace) -> int:
    scenario = build_nfpe_scenario(context.scenario)
    trajectory = evolve_nfpe(scenario)
    context.write("diagnostics", trajectory.table)
    x = scenario.grid.coordinates
    for i in _snapshot_indices(trajectory.times, context.scenario.output.snapshot_times):
        snapshot = pd.DataFrame({"x": x, "rho": trajectory.states[i], "rho_eq": trajectory.equilibrium})
        context.write(f"snapshot_{i:05d}", snapshot)
    final = trajectory.table.iloc[-1]
    context.summarize(
        l2_to_equilibrium=final["l2_to_equilibrium"],
        free_energy=final["free_energy"],
        beta_prime=trajectory.beta_prime,
    )
    return EXIT_OK


def run_nse_evolve(context: RunContext, args: argparse.Namespace) -> int:
    scenario = build_nse_scenario(context.scenario)
    trajectory = evolve_nse(scenario)
    context.write("diagnostics", trajectory.table)
    if scenario.variable_diffusion:
        residuals = variable_D_residuals(trajectory, scenario)
        context.summarize(
            max_relative_p=residuals["relative_p"].max(), max_relative_e=residuals["relative_e"].max()
        )
    else:
        residuals = ehrenfest_residuals(trajectory, scenario)
        context.summarize(
            max_residual_r1=residuals["residual_r1"].abs().max(),
            max_residual_r2=residuals["residual_r2"].abs().max(),
        )
    context.write("ehrenfest", residuals)
    for i in _snapshot_indices(trajectory.times, context.scenario.output.snapshot_times):
        context.write(f"snapshot_{i:05d}", snapshot_table(trajectory.wavefunction(i), scenario.model.rho_floor))
    table = trajectory.table
    context.summarize(
        norm_drift=abs(table["norm"].iloc[-1] - table["norm"].iloc[0]),
        energy_drift=abs(table["energy"].iloc[-1] - table["energy"].iloc[0]),
    )
    return EXIT_OK


def run_gauge_check(context: RunContext, args: argparse.Namespace) -> int:
    scenario = build_nse_scenario(context.scenario)
    _, _, report = paired_evolution(scenario, context.scenario.integrator.drop_potential_difference)
    context.write("gauge", report)
    context.summarize(max_density_discrepancy=report["max_density_discrepancy"].max())
    return EXIT_OK


def run_dg_linearize(context: RunContext, args: argparse.Namespace) -> int:
    report = dg_chain(build_nse_scenario(context.scenario))
    context.write("dg_chain", report)
    context.summarize(**{column: report[column].iloc[-1] for column in report.columns if column != "t"})
    return EXIT_OK


def run_dispersion(context: RunContext, args: argparse.Namespace) -> int:
    spec = context.scenario
    rows = [(spec.initial.amplitude, k) for k in dispersion_wavenumbers(spec)]
    table = dispersion_table(
        build_model(spec),
        rows,
        build_grid(spec),
        diffusion=spec.physics.diffusion,
        hbar=spec.physics.hbar,
        mass=spec.physics.mass,
        dt=spec.integrator.dt,
        t_end=spec.integrator.t_end,
    )
    context.write("dispersion", table)
    context.summarize(max_relative_error=table["relative_error"].max())
    return EXIT_OK


def run_catalog(context: RunContext, args: argparse.Namespace) -> int:
    model = build_model(context.scenario)
    lo, hi = model.monotonic_range
    rho = np.logspace(np.log10(CATALOG_RHO_MIN), np.log10(CATALOG_RHO_MAX), CATALOG_POINTS)
    context.write("catalog", catalog_table(model, rho[(rho > lo) & (rho < hi)]))
    return EXIT_OK


def run_verify(context: RunContext, args: argparse.Namespace) -> int:
    results = run_suite(workers=args.workers, tolerance_scale=args.tolerance_scale, seed=args.seed)
    context.write("acceptance", suite_table(results))
    context.manifest.checks = {result.name: result.passed for result in results}
    failed = [result.name for result in results if not result.passed]
    if failed:
        raise AcceptanceError(f"{len(failed)} acceptance check(s) failed: {', '.join(failed)}")
    return EXIT_OK


SUBCOMMANDS: Dict[str, Callable[[RunContext, argparse.Namespace], int]] = {
    "nfpe-relax": run_nfpe_relax,
    "nse-evolve": run_nse_evolve,
    "gauge-check": run_gauge_check,
    "dg-linearize": run_dg_linearize,
    "dispersion": run_dispersion,
    "catalog": run_catalog,
    "verify": run_verify,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="kinquant",
        description="Nonlinear Fokker-Planck and Schroedinger solvers for generalized entropies.",
    )
    parser.add_argument("subcommand", choices=list(SUBCOMMANDS))
    parser.add_argument("--scenario", type=Path, help="Scenario file; optional for verify")
    parser.add_argument("--out", type=Path, default=None, help="Output directory (default: [output] directory)")
    parser.add_argument("--seed", type=int, default=0, help="Seed of the random property fields")
    parser.add_argument("--tolerance-scale", type=float, default=1.0, help="Factor applied to every tolerance")
    parser.add_argument("--workers", type=int, default=1, help="Worker processes for verify")
    parser.add_argument("--verbose", action="store_true", help="Log progress at INFO level")
    return parser


def exit_code_for(err: Exception) -> int:
    if isinstance(err, AcceptanceError):
        return EXIT_ACCEPTANCE
    if isinstance(err, (DomainError, RangeError, DecompositionError, IntegrationError)):
        return EXIT_NUMERICAL
    if isinstance(err, (ConfigurationError, UsageError)):
        return EXIT_VALIDATION
    return EXIT_NUMERICAL


def run(subcommand: str, scenario_path: Optional[Path], args: argparse.Namespace) -> int:
    """
    Runs one subcommand and writes its tables and manifest.

    Args:
        subcommand: Key of SUBCOMMANDS
        scenario_path: Scenario file; required for every subcommand but verify
        args: Parsed flags (out, seed, tolerance_scale, workers)

    Returns:
        Process exit code
    """
    try:
        scenario = load_scenario(scenario_path) if scenario_path is not None else None
        if scenario is None and subcommand != "verify":
            raise UsageError(f"'{subcommand}' needs --scenario")
        if scenario is not None and subcommand in SUBCOMMAND_KINDS:
            if scenario.kind not in SUBCOMMAND_KINDS[subcommand]:
                raise UsageError(
                    f"'{subcommand}' cannot run a '{scenario.kind}' scenario, expected one of "
                    f"{SUBCOMMAND_KINDS[subcommand]}"
                )
    except (KinquantError, OSError) as err:
        logger.error("%s", err)
        print(err, file=sys.stderr)
        return EXIT_VALIDATION

    out_dir = args.out or Path(scenario.output.directory if scenario is not None else "output")
    context = RunContext(subcommand, scenario, out_dir, args.seed)
    try:
        code = SUBCOMMANDS[subcommand](context, args)
    except KinquantError as err:
        code = exit_code_for(err)
        logger.error("%s failed: %s", subcommand, err)
        print(err, file=sys.stderr)
    context.finish(code)
    return code


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    return run(args.subcommand, args.scenario, args)


if __name__ == "__main__":
    sys.exit(main())
