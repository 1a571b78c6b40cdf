"""End-to-end runs of the command-line entry point into a temporary directory."""

import json

import numpy as np
import pytest

import kinquant as kq
from kinquant.cli_runner import (
    EXIT_ACCEPTANCE,
    EXIT_NUMERICAL,
    EXIT_OK,
    EXIT_VALIDATION,
    build_parser,
    exit_code_for,
    main,
)
from kinquant.data_utils import file_sha256, read_table
from kinquant.exceptions import AcceptanceError, IntegrationError, RangeError, ScenarioValidationError, UsageError
from kinquant.scenario_config import scenario_hash

from conftest import scenario_text

SMALL_NSE = dict(
    grid={"n_points": "128", "length": "12"},
    integrator={"kind": "nse", "dt": "1e-3", "t_end": "0.05", "cadence": "5"},
)


def _write_scenario(tmp_path, name="scenario.ini", **sections):
    path = tmp_path / name
    path.write_text(scenario_text(**sections), encoding="utf-8")
    return path


def _run(subcommand, scenario, out):
    return main([subcommand, "--scenario", str(scenario), "--out", str(out)])


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def test_catalog_writes_table(tmp_path):
    scenario = _write_scenario(tmp_path)
    assert _run("catalog", scenario, tmp_path / "out") == EXIT_OK

    data, metadata = read_table(tmp_path / "out" / "run_catalog.csv")
    np.testing.assert_allclose(data["f"], 1.0, rtol=1e-12)
    assert metadata["subcommand"] == "catalog"
    assert metadata["model"] == kq.bg().label
    assert metadata["seed"] == "0"


def test_catalog_runs_are_byte_identical(tmp_path):
    scenario = _write_scenario(tmp_path, model={"variant": "tsallis", "q": "2.0"})
    assert _run("catalog", scenario, tmp_path / "first") == EXIT_OK
    assert _run("catalog", scenario, tmp_path / "second") == EXIT_OK
    first = (tmp_path / "first" / "run_catalog.csv").read_bytes()
    second = (tmp_path / "second" / "run_catalog.csv").read_bytes()
    assert first == second


def test_manifest_lists_files_and_hashes(tmp_path):
    scenario = _write_scenario(tmp_path, output={"prefix": "bgdump"})
    out = tmp_path / "out"
    assert _run("catalog", scenario, out) == EXIT_OK

    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["subcommand"] == "catalog"
    assert manifest["exit_code"] == EXIT_OK
    assert manifest["files"] == ["bgdump_catalog.csv", "bgdump_scenario.ini"]
    for name, digest in manifest["file_hashes"].items():
        assert file_sha256(out / name) == digest
    assert manifest["scenario_hash"] == scenario_hash(kq.load_scenario(scenario))


def test_written_scenario_reloads_to_the_same_hash(tmp_path):
    scenario = _write_scenario(tmp_path, physics={"diffusion": "5e-2"})
    out = tmp_path / "out"
    assert _run("catalog", scenario, out) == EXIT_OK
    assert scenario_hash(kq.load_scenario(out / "run_scenario.ini")) == scenario_hash(kq.load_scenario(scenario))


# ---------------------------------------------------------------------------
# Simulations
# ---------------------------------------------------------------------------


def test_nse_evolve_writes_diagnostics(tmp_path):
    scenario = _write_scenario(tmp_path, **SMALL_NSE)
    out = tmp_path / "out"
    assert _run("nse-evolve", scenario, out) == EXIT_OK

    diagnostics, _ = read_table(out / "run_diagnostics.csv")
    assert {"t", "norm", "x_mean", "p_mean", "energy"} <= set(diagnostics.columns)
    assert diagnostics["norm"].iloc[-1] == pytest.approx(diagnostics["norm"].iloc[0], abs=1e-6)
    assert (out / "run_ehrenfest.csv").exists()
    assert len(list(out.glob("run_snapshot_*.csv"))) == 2

    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert manifest["summary"]["norm_drift"] < 1e-6


def test_nfpe_relax_writes_snapshots(tmp_path):
    scenario = _write_scenario(
        tmp_path,
        grid={"n_points": "128", "length": "12"},
        potential={"kind": "harmonic"},
        integrator={"kind": "nfpe", "dt": "1e-3", "t_end": "0.05", "cadence": "10"},
    )
    out = tmp_path / "out"
    assert _run("nfpe-relax", scenario, out) == EXIT_OK

    snapshots = sorted(out.glob("run_snapshot_*.csv"))
    assert len(snapshots) == 2
    snapshot, _ = read_table(snapshots[-1])
    assert list(snapshot.columns) == ["x", "rho", "rho_eq"]
    manifest = json.loads((out / "manifest.json").read_text(encoding="utf-8"))
    assert set(manifest["summary"]) == {"l2_to_equilibrium", "free_energy", "beta_prime"}


# ---------------------------------------------------------------------------
# Failures
# ---------------------------------------------------------------------------


def test_invalid_scenario_exits_with_validation_code(tmp_path, capsys):
    scenario = _write_scenario(tmp_path, integrator={"kind": "nse", "dt": "0.01"})
    assert _run("nse-evolve", scenario, tmp_path / "out") == EXIT_VALIDATION
    assert "suggested dt" in capsys.readouterr().err
    assert not (tmp_path / "out").exists()


def test_missing_scenario_is_a_usage_error(tmp_path):
    assert main(["catalog", "--out", str(tmp_path)]) == EXIT_VALIDATION


def test_subcommand_rejects_other_scenario_kinds(tmp_path, capsys):
    scenario = _write_scenario(tmp_path, **SMALL_NSE)
    assert _run("nfpe-relax", scenario, tmp_path / "out") == EXIT_VALIDATION
    assert "cannot run a 'nse' scenario" in capsys.readouterr().err


def test_unknown_subcommand_exits_through_argparse():
    with pytest.raises(SystemExit):
        build_parser().parse_args(["teleport"])


@pytest.mark.parametrize(
    "err, code",
    [
        (AcceptanceError("2 failed"), EXIT_ACCEPTANCE),
        (IntegrationError("norm drift", step=3), EXIT_NUMERICAL),
        (RangeError("outside", (0.0, 1.0)), EXIT_NUMERICAL),
        (ScenarioValidationError(["bad"]), EXIT_VALIDATION),
        (UsageError("bad call"), EXIT_VALIDATION),
    ],
)
def test_exit_code_for(err, code):
    assert exit_code_for(err) == code
