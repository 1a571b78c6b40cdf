"""Plot functions draw onto the given axes; the notebook summary returns its table and figure."""

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import pytest

import kinquant as kq
from kinquant.catalog_interact import model_catalog_summary
from kinquant.nfpe_solver import NfpeTrajectory
from kinquant.plot_utils import relative_drift, set_fontsize, transform_axis


@pytest.fixture(autouse=True)
def close_figures():
    yield
    plt.close("all")


def _diagnostics_table():
    t = np.linspace(0.0, 1.0, 11)
    return pd.DataFrame(
        {"t": t, "norm": 1.0 + 1e-12 * t, "energy": 0.625 - 1e-9 * t ** 2, "free_energy": np.exp(-t) - 2}
    )


def _trajectory(grid):
    times = np.linspace(0.0, 1.0, 6)
    x = grid.coordinates
    states = [np.exp(-(x ** 2) / (1 + t)) / np.sqrt(np.pi * (1 + t)) for t in times]
    return NfpeTrajectory(times, states, _diagnostics_table())


def test_density_snapshots(coarse_grid):
    _, ax = plt.subplots()
    rho_eq = np.exp(-(coarse_grid.coordinates ** 2) / 2) / np.sqrt(2 * np.pi)
    out = kq.density_snapshots(_trajectory(coarse_grid), ax=ax, n_snapshots=3, equilibrium=rho_eq)
    assert out is ax
    # three snapshots plus the equilibrium reference; legend proxies carry no samples
    drawn = [line for line in ax.get_lines() if len(line.get_xdata()) == coarse_grid.n_points]
    assert len(drawn) == 4
    assert sum(line.get_label() == "equilibrium" for line in drawn) == 1
    assert ax.get_ylabel() == "density"


def test_conservation_plot_log_scale():
    ax = kq.conservation_plot(_diagnostics_table(), transform="log")
    assert ax.get_yscale() == "log"
    assert ax.get_ylabel() == "relative drift (log10 scale)"


def test_conservation_plot_log_scale_keeps_the_first_record():
    ax = kq.conservation_plot(_diagnostics_table(), columns=["energy"], transform="log")
    (line,) = [line for line in ax.get_lines() if len(line.get_xdata())]
    assert len(line.get_xdata()) == 11
    assert line.get_ydata()[0] == np.finfo(float).eps


def test_conservation_plot_unknown_transform():
    with pytest.raises(ValueError, match="sqrt"):
        kq.conservation_plot(_diagnostics_table(), transform="sqrt")


def test_conservation_plot_unknown_column():
    with pytest.raises(ValueError, match="momentum"):
        kq.conservation_plot(_diagnostics_table(), columns=["norm", "momentum"])


def test_free_energy_plot():
    table = _diagnostics_table()
    ax = kq.free_energy_plot(table, fontsize=9)
    assert ax.get_ylabel() == "free energy"
    assert ax.yaxis.label.get_fontsize() == pytest.approx(10)


def test_catalog_plot_log_axis():
    table = kq.catalog_table(kq.tsallis(2.0))
    ax = kq.catalog_plot(table, ["ln_kappa", "f"])
    assert ax.get_xscale() == "log"
    assert ax.get_xlabel() == "rho (log10 scale)"


def test_model_catalog_summary_returns_table_and_figure():
    table, fig = model_catalog_summary("eip", kappa_e=-0.5, drift="nonlinear_drift", rho_max=10.0)
    lo, hi = kq.eip(-0.5).monotonic_range
    assert table["rho"].max() < hi
    assert fig.axes[0].get_title() == kq.eip(-0.5, "nonlinear_drift").label


def test_model_catalog_summary_ignores_nonlinear_drift_for_other_models():
    table, fig = model_catalog_summary("bg", drift="nonlinear_drift", log_axis=False)
    np.testing.assert_allclose(table["f"], 1.0)
    assert fig.axes[0].get_xscale() == "linear"


def test_transform_axis_identity_keeps_scale():
    _, ax = plt.subplots()
    transform_axis(ax, "rho", "identity", xaxis=True)
    assert ax.get_xscale() == "linear"
    set_fontsize(ax, 14)
    assert ax.xaxis.label.get_fontsize() == pytest.approx(15)


def test_relative_drift_with_vanishing_reference():
    np.testing.assert_allclose(relative_drift(np.array([0.0, 1e-3]), 0.0), [0.0, 1e-3])
    np.testing.assert_allclose(relative_drift(np.array([2.0, 2.2]), 2.0), [0.0, 0.1])
