import matplotlib.pyplot as plt


def set_fontsize(ax: plt.Axes, fontsize: float) -> plt.Axes:
    """Axis labels one point above fontsize, tick labels at fontsize."""
    ax.xaxis.label.set_fontsize(float(fontsize) + 1)
    ax.yaxis.label.set_fontsize(float(fontsize) + 1)
    ax.tick_params(axis="both", labelsize=fontsize)
    return ax


def transform_axis(
    ax: plt.Axes,
    label: str,
    transform: str = "identity",
    xaxis: bool = False,
) -> plt.Axes:
    """
    Switches one axis of a plot to a log10 scale.

    Args:
        ax: Axes to modify
        label: Quantity shown on the axis, used for the new axis label
        transform: 'identity' leaves the axis alone, 'log' sets a log10 scale
        xaxis: Whether to transform the x or the y axis

    Returns:
        The modified axes

    Raises:
        ValueError: for any other transform
    """
    if transform not in ("identity", "log"):
        raise ValueError(f"Unknown transform '{transform}'")
    if transform == "identity":
        return ax
    set_label, set_scale = (ax.set_xlabel, ax.set_xscale) if xaxis else (ax.set_ylabel, ax.set_yscale)
    set_scale("log", base=10)
    set_label(f"{label} (log10 scale)")
    return ax


def relative_drift(values, reference: float):
    """(values - reference) / |reference|, or the absolute drift when the reference vanishes."""
    scale = abs(reference) if reference != 0 else 1.0
    return (values - reference) / scale
