from typing import List, Optional, Sequence

import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns

from .data_utils import clip_for_log_axis
from .plot_utils import relative_drift, set_fontsize, transform_axis


def density_snapshots(
    trajectory,
    ax: Optional[plt.Axes] = None,
    n_snapshots: int = 5,
    equilibrium: Optional[np.ndarray] = None,
    fontsize: float = 12,
    **kwargs,
) -> plt.Axes:
    """
    Plots the density at evenly spaced recorded times of a trajectory.

    Args:
        trajectory: NfpeTrajectory or NseTrajectory
        ax: matplotlib axes to draw plot onto
        n_snapshots: Number of recorded states to draw
        equilibrium: Optional reference density drawn dashed in black
        fontsize: Font size of axis and tick labels
        kwargs: Additional keyword arguments passed through to sns.lineplot

    Returns:
        The axes plot was drawn to

    Example:
        .. plot::

            import kinquant
            grid = kinquant.Grid1D(256, 20.0)
            psi0 = kinquant.gaussian_packet(grid, width=1.0, boost=1.0)
            scenario = kinquant.NseScenario(kinquant.bg(), grid, 0 * grid.coordinates, psi0, diffusion=0.0)
            kinquant.density_snapshots(kinquant.evolve_nse(scenario))
    """
    grid = getattr(trajectory, "grid", None)
    states = trajectory.states
    indices = np.unique(np.linspace(0, len(states) - 1, min(n_snapshots, len(states))).astype(int))
    frames = []
    for i in indices:
        rho = states[i] if np.isrealobj(states[i]) else np.abs(states[i]) ** 2
        x = grid.coordinates if grid is not None else np.arange(rho.size)
        frames.append(pd.DataFrame({"x": x, "rho": rho, "t": f"{trajectory.times[i]:.3g}"}))
    data = pd.concat(frames, ignore_index=True)

    ax = sns.lineplot(x="x", y="rho", hue="t", data=data, ax=ax, **kwargs)
    if equilibrium is not None:
        ax.plot(frames[0]["x"], equilibrium, "k--", label="equilibrium")
        ax.legend(title="t")
    ax.set_ylabel("density")
    set_fontsize(ax, fontsize)
    return ax


def conservation_plot(
    table: pd.DataFrame,
    columns: Sequence[str] = ("norm", "energy"),
    ax: Optional[plt.Axes] = None,
    transform: str = "identity",
    fontsize: float = 12,
    **kwargs,
) -> plt.Axes:
    """
    Plots the relative drift of conserved quantities along a diagnostics table.

    Args:
        table: Diagnostics table with a 't' column
        columns: Columns to plot, each relative to its first value
        ax: matplotlib axes to draw plot onto
        transform: 'log' plots the absolute drift on a log axis
        fontsize: Font size of axis and tick labels
        kwargs: Additional keyword arguments passed through to sns.lineplot

    Returns:
        The axes plot was drawn to
    """
    missing = [c for c in columns if c not in table.columns]
    if missing:
        raise ValueError(f"Unknown diagnostics columns {missing}")
    frames = []
    for column in columns:
        drift = relative_drift(table[column].to_numpy(), table[column].iloc[0])
        if transform == "log":
            drift = np.abs(drift)
        frames.append(pd.DataFrame({"t": table["t"], "drift": drift, "quantity": column}))
    data = pd.concat(frames, ignore_index=True)
    if transform == "log":
        data = clip_for_log_axis(data, "drift", floor=np.finfo(float).eps)

    ax = sns.lineplot(x="t", y="drift", hue="quantity", data=data, ax=ax, **kwargs)
    ax.set_ylabel("relative drift")
    ax = transform_axis(ax, "relative drift", transform=transform)
    set_fontsize(ax, fontsize)
    return ax


def free_energy_plot(
    table: pd.DataFrame,
    ax: Optional[plt.Axes] = None,
    fontsize: float = 12,
    **kwargs,
) -> plt.Axes:
    """Free energy against time for an NFPE diagnostics table, with the final value as a reference line."""
    ax = sns.lineplot(x="t", y="free_energy", data=table, ax=ax, **kwargs)
    ax.axhline(table["free_energy"].iloc[-1], color="gray", linestyle=":")
    ax.set_ylabel("free energy")
    set_fontsize(ax, fontsize)
    return ax


def catalog_plot(
    table: pd.DataFrame,
    columns: List[str],
    ax: Optional[plt.Axes] = None,
    log_axis: bool = True,
    fontsize: float = 12,
    **kwargs,
) -> plt.Axes:
    """
    Plots catalog functionals against density.

    Args:
        table: Output of catalog_table
        columns: Functional columns to draw, e.g. ['ln_kappa', 'f']
        ax: matplotlib axes to draw plot onto
        log_axis: Whether to use a log density axis
        fontsize: Font size of axis and tick labels
        kwargs: Additional keyword arguments passed through to sns.lineplot

    Returns:
        The axes plot was drawn to

    Example:
        .. plot::

            import kinquant
            kinquant.catalog_plot(kinquant.catalog_table(kinquant.tsallis(2.0)), ["ln_kappa", "f"])
    """
    data = table.melt(id_vars="rho", value_vars=list(columns), var_name="functional", value_name="value")
    transform = "log" if log_axis else "identity"
    if log_axis:
        data = clip_for_log_axis(data, "rho")
    ax = sns.lineplot(x="rho", y="value", hue="functional", data=data, ax=ax, **kwargs)
    ax.set_xlabel("rho")
    ax = transform_axis(ax, "rho", transform=transform, xaxis=True)
    set_fontsize(ax, fontsize)
    return ax
