import logging
from typing import Callable, TypeVar

import numpy as np

from .config import STABILITY_FACTOR

logger = logging.getLogger(__name__)

State = TypeVar("State")


def rk4_step(rhs: Callable, state, t: float, dt: float):
    """
    One classical Runge-Kutta step.

    Args:
        rhs: Callable rhs(state, t) returning the time derivative; states may be arrays or tuples of arrays
        state: Current state
        t: Current time
        dt: Time step

    Returns:
        State at t + dt
    """
    k1 = rhs(state, t)
    k2 = rhs(_axpy(state, 0.5 * dt, k1), t + 0.5 * dt)
    k3 = rhs(_axpy(state, 0.5 * dt, k2), t + 0.5 * dt)
    k4 = rhs(_axpy(state, dt, k3), t + dt)
    if isinstance(state, tuple):
        return tuple(
            s + dt / 6.0 * (a + 2.0 * b + 2.0 * c + d)
            for s, a, b, c, d in zip(state, k1, k2, k3, k4)
        )
    return state + dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _axpy(state, alpha: float, slope):
    if isinstance(state, tuple):
        return tuple(s + alpha * k for s, k in zip(state, slope))
    return state + alpha * slope


def diffusive_time_step(spacing: float, coefficient: float, factor: float = STABILITY_FACTOR) -> float:
    """Explicit bound factor * spacing^2 / coefficient; infinite when the coefficient vanishes."""
    if coefficient <= 0:
        return np.inf
    return factor * spacing ** 2 / coefficient


def step_count(t_end: float, dt: float) -> int:
    """Number of steps of size close to dt that land exactly on t_end."""
    return max(1, int(np.ceil(t_end / dt - 1e-9)))
