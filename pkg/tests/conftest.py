"""Shared fixtures: seeded generator, standard grids and a spread of catalog models."""

import matplotlib

matplotlib.use("Agg")

import numpy as np
import pytest

import kinquant as kq


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def grid():
    return kq.Grid1D(256, 20.0)


@pytest.fixture
def coarse_grid():
    return kq.Grid1D(128, 12.0)


CATALOG_MODELS = {
    "bg": kq.bg(),
    "two_param": kq.two_param(0.5, 0.25),
    "tsallis_q2": kq.tsallis(2.0),
    "tsallis_q05": kq.tsallis(0.5),
    "kaniadakis": kq.kaniadakis(0.5),
    "eip_plus": kq.eip(0.5),
    "eip_minus": kq.eip(-0.5),
    "eip_nonlinear": kq.eip(0.5, "nonlinear_drift"),
}


@pytest.fixture(params=list(CATALOG_MODELS), ids=list(CATALOG_MODELS))
def model(request):
    return CATALOG_MODELS[request.param]


def packet_scenario(model, grid=None, diffusion=0.05, potential=None, **kwargs):
    """Width-1, boost-1 Gaussian packet in a box; center and chirp shape the packet, other kwargs go to NseScenario."""
    grid = grid or kq.Grid1D(256, 20.0)
    center, chirp = kwargs.pop("center", 0.0), kwargs.pop("chirp", 0.0)
    psi0 = kq.gaussian_packet(grid, center=center, width=1.0, boost=1.0, chirp=chirp)
    potential = np.zeros(grid.shape) if potential is None else potential
    return kq.NseScenario(model, grid, potential, psi0, diffusion=diffusion, **kwargs)


def scenario_text(**sections):
    """Scenario file text from {section: {key: value}}; a bare nse BG scenario by default."""
    sections.setdefault("model", {"variant": "bg"})
    sections.setdefault("integrator", {"kind": "nse"})
    lines = []
    for name, values in sections.items():
        lines.append(f"[{name}]")
        lines.extend(f"{key} = {value}" for key, value in values.items())
    return "\n".join(lines) + "\n"
