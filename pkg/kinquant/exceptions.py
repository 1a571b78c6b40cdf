from typing import List, Optional, Tuple

import numpy as np


class KinquantError(Exception):
    """Base class for every error raised by kinquant."""


class ConfigurationError(KinquantError, ValueError):
    """Model or scenario parameters that cannot describe a valid system."""


class UsageError(KinquantError, ValueError):
    """A function was called with arguments outside its contract."""


class DomainError(KinquantError, ValueError):
    """A functional was evaluated outside its domain (e.g. negative density)."""


class RangeError(KinquantError, ValueError):
    """
    A value lies outside the range of an invertible functional.

    Args:
        message: Human readable description
        interval: Admissible (low, high) interval for the value
    """

    def __init__(self, message: str, interval: Tuple[float, float]):
        super().__init__(f"{message} (admissible interval: {interval[0]:.6g} to {interval[1]:.6g})")
        self.interval = interval


class DecompositionError(KinquantError, ValueError):
    """
    Polar decomposition hit a node inside the support of the density.

    Args:
        message: Human readable description
        location: Grid coordinate of the first node found
    """

    def __init__(self, message: str, location: float):
        super().__init__(f"{message} at x = {location:.6g}")
        self.location = location


class IntegrationError(KinquantError, RuntimeError):
    """
    A time integration went unstable.

    Args:
        message: Human readable description
        step: Index of the step that failed
        state: Last state before the failure, kept for inspection
    """

    def __init__(self, message: str, step: int, state: Optional[np.ndarray] = None):
        super().__init__(f"{message} (step {step})")
        self.step = step
        self.state = state


class ScenarioValidationError(ConfigurationError):
    """Collects every problem found while validating a scenario file."""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__(
            f"{len(self.errors)} scenario error(s):\n" + "\n".join(f"  - {e}" for e in self.errors)
        )


class AcceptanceError(KinquantError):
    """One or more acceptance checks failed."""


class ConvergenceError(KinquantError, RuntimeError):
    """An adaptive quadrature or root search did not converge."""
