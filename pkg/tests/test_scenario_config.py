"""Scenario file parsing, validation messages and the normalized serialized form."""

import numpy as np
import pytest

import kinquant as kq
from kinquant.exceptions import ScenarioValidationError
from kinquant.scenario_config import (
    build_grid,
    build_model,
    build_nfpe_scenario,
    build_nse_scenario,
    build_potential,
    dispersion_wavenumbers,
    scenario_hash,
    try_parse_scenario,
)

from conftest import scenario_text


def _errors(text):
    with pytest.raises(ScenarioValidationError) as info:
        kq.parse_scenario(text)
    return info.value.errors


# ---------------------------------------------------------------------------
# Defaults
# ---------------------------------------------------------------------------


def test_minimal_scenario_gets_defaults():
    scenario = kq.parse_scenario(scenario_text())
    assert scenario.kind == "nse"
    assert scenario.model.variant == "bg"
    assert scenario.integrator.cadence == 10
    assert scenario.integrator.dt == pytest.approx(1e-3)
    assert scenario.physics.g_coeffs == ()
    assert scenario.physics.diffusion == pytest.approx(0.1)
    assert scenario.grid.n_points == 256
    assert scenario.output.prefix == "run"


def test_values_are_coerced_to_schema_types():
    text = scenario_text(
        physics={"g_coeffs": "0.0, 0.3", "diffusion": "0.05"},
        integrator={"kind": "nse", "cadence": "5", "drop_potential_difference": "yes"},
        output={"snapshot_times": "0.0, 0.5"},
    )
    scenario = kq.parse_scenario(text)
    assert scenario.physics.g_coeffs == (0.0, 0.3)
    assert scenario.integrator.cadence == 5
    assert scenario.integrator.drop_potential_difference is True
    assert scenario.output.snapshot_times == (0.0, 0.5)


# ---------------------------------------------------------------------------
# Structural errors
# ---------------------------------------------------------------------------


def test_unknown_key_is_reported():
    errors = _errors(scenario_text(model={"variant": "bg", "temperature": "1"}))
    assert any("Unknown key 'temperature'" in error for error in errors)


def test_unknown_section_is_reported():
    errors = _errors(scenario_text(solver={"order": "4"}))
    assert any("Unknown section [solver]" in error for error in errors)


def test_missing_required_key_is_reported():
    errors = _errors(scenario_text(model={"q": "2.0"}))
    assert any("Missing required key 'variant' in [model]" in error for error in errors)


def test_bad_type_is_reported():
    errors = _errors(scenario_text(grid={"n_points": "many"}))
    assert any("n_points" in error and "not a valid int" in error for error in errors)


def test_malformed_file_is_reported():
    errors = _errors("variant = bg\n")
    assert len(errors) == 1
    assert errors[0].startswith("Malformed scenario file")


def test_every_error_is_collected():
    text = scenario_text(
        model={"variant": "bg", "colour": "red"},
        grid={"length": "-1"},
        integrator={"kind": "teleport", "cadence": "0"},
    )
    errors = _errors(text)
    assert len(errors) >= 4
    joined = "\n".join(errors)
    assert "Unknown key 'colour'" in joined
    assert "length must be positive" in joined
    assert "Unknown integrator kind 'teleport'" in joined
    assert "cadence must be at least 1" in joined


def test_validation_error_message_lists_errors():
    with pytest.raises(ScenarioValidationError) as info:
        kq.parse_scenario(scenario_text(model={"variant": "bg", "colour": "red"}))
    assert "scenario error(s)" in str(info.value)
    assert isinstance(info.value, kq.ConfigurationError)


# ---------------------------------------------------------------------------
# Physical validation
# ---------------------------------------------------------------------------


def test_unstable_time_step_suggests_a_value():
    errors = _errors(scenario_text(integrator={"kind": "nse", "dt": "0.01"}))
    assert len(errors) == 1
    assert "exceeds the stability bound" in errors[0]
    assert "suggested dt = 0.0012" in errors[0]


def test_inadmissible_wavenumber_names_nearest():
    text = scenario_text(initial={"wavenumbers": "1.0"}, integrator={"kind": "dispersion"})
    errors = _errors(text)
    assert any("nearest admissible k is 0.942477796077" in error for error in errors)


def test_admissible_wavenumber_passes():
    k = 2 * np.pi * 3 / 20.0
    text = scenario_text(initial={"wavenumbers": repr(k)}, integrator={"kind": "dispersion", "dt": "1e-4"})
    scenario = kq.parse_scenario(text)
    assert dispersion_wavenumbers(scenario) == (k,)


def test_initial_state_outside_monotonic_interval():
    text = scenario_text(model={"variant": "eip", "kappa_e": "-0.5"}, initial={"width": "0.1"})
    errors = _errors(text)
    assert any("is not monotonic for densities in" in error for error in errors)


def test_invalid_model_parameters_are_reported():
    errors = _errors(scenario_text(model={"variant": "tsallis", "q": "0"}))
    assert len(errors) == 1


def test_nfpe_needs_positive_diffusion():
    errors = _errors(scenario_text(physics={"diffusion": "0"}, integrator={"kind": "nfpe"}))
    assert errors == ["NFPE scenarios need a positive diffusion"]


def test_try_parse_scenario_is_total():
    scenario, errors = try_parse_scenario(scenario_text())
    assert scenario is not None and errors == []
    scenario, errors = try_parse_scenario(scenario_text(model={"q": "2"}))
    assert scenario is None
    assert errors


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------


def test_serialized_form_parses_back():
    text = scenario_text(
        model={"variant": "tsallis", "q": "1.5"},
        physics={"g_coeffs": "0.0, 0.3", "diffusion": "0.05"},
        potential={"kind": "harmonic", "omega0": "0.5"},
        output={"prefix": "tsallis", "snapshot_times": "0.25"},
    )
    scenario = kq.parse_scenario(text)
    assert kq.parse_scenario(kq.serialize_scenario(scenario)) == scenario


def test_hash_ignores_formatting():
    plain = kq.parse_scenario(scenario_text(physics={"diffusion": "0.05"}))
    spaced = kq.parse_scenario("[integrator]\nkind=nse\n\n[physics]\ndiffusion = 5e-2\n[model]\nvariant=bg\n")
    assert scenario_hash(plain) == scenario_hash(spaced)
    other = kq.parse_scenario(scenario_text(physics={"diffusion": "0.06"}))
    assert scenario_hash(plain) != scenario_hash(other)


def test_load_scenario_reads_file(tmp_path):
    path = tmp_path / "packet.ini"
    path.write_text(scenario_text(initial={"boost": "1.0"}), encoding="utf-8")
    scenario = kq.load_scenario(path)
    assert scenario.initial.boost == pytest.approx(1.0)


# ---------------------------------------------------------------------------
# Builders
# ---------------------------------------------------------------------------


def test_builders_follow_the_file():
    text = scenario_text(
        model={"variant": "tsallis", "q": "2.0"},
        grid={"n_points": "128", "length": "12"},
        potential={"kind": "harmonic", "omega0": "1.0"},
        integrator={"kind": "nse", "dt": "5e-4", "t_end": "0.1"},
    )
    scenario = kq.parse_scenario(text)
    grid = build_grid(scenario)
    assert grid.n_points == 128
    assert grid.length == pytest.approx(12.0)
    assert build_model(scenario).variant == "tsallis"
    potential = build_potential(scenario, grid)
    np.testing.assert_allclose(potential, 0.5 * grid.coordinates ** 2)

    nse = build_nse_scenario(scenario)
    assert nse.dt == pytest.approx(5e-4)
    assert nse.expected_norm == pytest.approx(1.0, rel=1e-8)


def test_nfpe_builder_from_plane_wave_is_uniform():
    text = scenario_text(
        grid={"n_points": "128", "length": "12"},
        potential={"kind": "harmonic"},
        initial={"kind": "plane_wave"},
        integrator={"kind": "nfpe", "dt": "1e-4"},
    )
    nfpe = build_nfpe_scenario(kq.parse_scenario(text))
    np.testing.assert_allclose(nfpe.rho0, 1.0 / 12.0)
    assert nfpe.beta == pytest.approx(1.0)
