import warnings
from typing import Sequence

import ipywidgets as widgets
import matplotlib.pyplot as plt
import numpy as np
import pandas as pd
import seaborn as sns
from IPython.display import display

from .config import CATALOG_POINTS, CATALOG_RHO_MIN, WIDGET_PARAMS
from .entropy_catalog import catalog_table, make_model
from .exceptions import ConfigurationError
from .field_plots import catalog_plot


def catalog_interact() -> None:
    """
    Notebook explorer over the entropy catalog.

    Shows the catalog table and a plot of the chosen functionals for the selected model; parameter sliders
    that do not apply to the selected variant are ignored.
    """
    sns.set(style="whitegrid")
    warnings.simplefilter("ignore")

    widget = widgets.interactive(
        model_catalog_summary,
        variant=widgets.Dropdown(**WIDGET_PARAMS["variant"]),
        deformation=widgets.FloatSlider(**WIDGET_PARAMS["deformation"]),
        r=widgets.FloatSlider(**WIDGET_PARAMS["r"]),
        q=widgets.FloatSlider(**WIDGET_PARAMS["q"]),
        kappa_e=widgets.FloatSlider(**WIDGET_PARAMS["kappa_e"]),
        drift=widgets.Dropdown(**WIDGET_PARAMS["drift"]),
        columns=widgets.SelectMultiple(**WIDGET_PARAMS["columns"]),
        rho_max=widgets.FloatSlider(**WIDGET_PARAMS["rho_max"]),
        log_axis=widgets.Checkbox(**WIDGET_PARAMS["log_axis"]),
        fig_width=widgets.IntSlider(**WIDGET_PARAMS["fig_width"]),
        fig_height=widgets.IntSlider(**WIDGET_PARAMS["fig_height"]),
        fontsize=widgets.FloatSlider(**WIDGET_PARAMS["fontsize"]),
        interactive=widgets.fixed(True),
    )
    widget.layout = widgets.Layout(flex_flow="row wrap")
    display(widget)


def model_catalog_summary(
    variant: str,
    deformation: float = 0.0,
    r: float = 0.0,
    q: float = 1.0,
    kappa_e: float = 0.0,
    drift: str = "linear_drift",
    columns: Sequence[str] = ("ln_kappa", "f"),
    rho_max: float = 10.0,
    log_axis: bool = True,
    fig_width: int = 12,
    fig_height: int = 6,
    fontsize: float = 12,
    interactive: bool = False,
):
    """
    Catalog table and functional plot for one model.

    Args:
        variant: Catalog entry name
        deformation: Deformation parameter of 'two_param' and 'kaniadakis'
        r: Second 'two_param' parameter
        q: Tsallis index
        kappa_e: EIP strength
        drift: EIP drift choice
        columns: Functionals to plot
        rho_max: Largest density tabulated
        log_axis: Whether to space densities logarithmically and plot on a log axis
        fig_width: Figure width in inches
        fig_height: Figure height in inches
        fontsize: Font size of axis and tick labels
        interactive: Whether to display the table and figure instead of returning them

    Returns:
        (table, figure) when not interactive
    """
    if drift == "nonlinear_drift" and variant != "eip":
        drift = "linear_drift"
    try:
        model = make_model(variant, deformation=deformation, r=r, q=q, kappa_e=kappa_e, drift=drift)
    except ConfigurationError as err:
        if interactive:
            print(err)
            return None
        raise

    lo, hi = model.monotonic_range
    if log_axis:
        rho = np.logspace(np.log10(CATALOG_RHO_MIN), np.log10(rho_max), CATALOG_POINTS)
    else:
        rho = np.linspace(CATALOG_RHO_MIN, rho_max, CATALOG_POINTS)
    rho = rho[(rho > lo) & (rho < hi)]
    table = catalog_table(model, rho)

    fig, ax = plt.subplots(figsize=(fig_width, fig_height))
    catalog_plot(table, list(columns), ax=ax, log_axis=log_axis, fontsize=fontsize)
    ax.set_title(model.label)

    if interactive:
        with pd.option_context("display.precision", 4):
            display(table[["rho"] + list(columns)].head(10))
        plt.show()
        return None
    return table, fig
