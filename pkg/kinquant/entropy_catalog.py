import logging
from dataclasses import dataclass, field
from typing import Callable, Optional, Tuple, Union

import numpy as np
import pandas as pd

from .config import (
    BG_LIMIT_THRESHOLD,
    BISECTION_ITERATIONS,
    CATALOG_POINTS,
    CATALOG_RHO_MAX,
    CATALOG_RHO_MIN,
    DRIFT_CHOICES,
    MODEL_VARIANTS,
    NEGATIVE_DENSITY_LIMIT,
    RHO_FLOOR,
)
from .exceptions import ConfigurationError, DomainError, RangeError

logger = logging.getLogger(__name__)

ArrayLike = Union[float, np.ndarray]

# Search window for the numerical inverse of kappa
INVERSE_BRACKET = (1e-300, 1e100)


@dataclass(frozen=True)
class EntropyModel:
    """
    Entry of the entropy catalog: the entropy generating functional kappa(rho) and the drift gamma(rho).

    Args:
        variant: One of 'bg', 'two_param', 'tsallis', 'kaniadakis', 'eip'
        deformation: Deformation parameter kappa of the 'two_param' and 'kaniadakis' logarithms
        r: Second parameter of the 'two_param' logarithm
        q: Tsallis index
        kappa_e: Strength of the exclusion-inclusion factor 1 + kappa_e rho ('eip' only)
        drift: 'linear_drift' (gamma = rho) or 'nonlinear_drift' (gamma = rho (1 + kappa_e rho), 'eip' only)
        rho_floor: Densities below this value are raised to it before any logarithm or division
    """

    variant: str
    deformation: float = 0.0
    r: float = 0.0
    q: float = 1.0
    kappa_e: float = 0.0
    drift: str = "linear_drift"
    rho_floor: float = RHO_FLOOR
    monotonic_range: Tuple[float, float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.variant not in MODEL_VARIANTS:
            raise ConfigurationError(
                f"Unknown model variant '{self.variant}', expected one of {MODEL_VARIANTS}"
            )
        if self.drift not in DRIFT_CHOICES:
            raise ConfigurationError(f"Unknown drift choice '{self.drift}', expected one of {DRIFT_CHOICES}")
        if self.drift == "nonlinear_drift" and self.variant != "eip":
            raise ConfigurationError("Only the 'eip' model defines a nonlinear drift")
        if not self.rho_floor > 0:
            raise ConfigurationError(f"rho_floor must be positive, got {self.rho_floor}")
        if self.variant == "tsallis" and not self.q > 0:
            raise ConfigurationError(f"Tsallis index must satisfy q > 0, got q = {self.q}")
        if self.variant in ["two_param", "tsallis", "kaniadakis"]:
            k, r = deformed_log_parameters(self)
            if not abs(k) < 1 + r:
                raise ConfigurationError(
                    f"Deformation parameters outside validity |kappa| < 1 + r: kappa = {k}, r = {r}"
                )
        object.__setattr__(self, "monotonic_range", _monotonic_range(self))

    @property
    def linear_drift(self) -> bool:
        return self.drift == "linear_drift"

    @property
    def label(self) -> str:
        if self.variant == "two_param":
            return f"two_param(kappa={self.deformation:g}, r={self.r:g})"
        if self.variant == "tsallis":
            return f"tsallis(q={self.q:g})"
        if self.variant == "kaniadakis":
            return f"kaniadakis(kappa={self.deformation:g})"
        if self.variant == "eip":
            return f"eip(kappa_e={self.kappa_e:g}, {self.drift})"
        return "bg"


def bg(rho_floor: float = RHO_FLOOR) -> EntropyModel:
    return EntropyModel("bg", rho_floor=rho_floor)


def two_param(deformation: float, r: float, rho_floor: float = RHO_FLOOR) -> EntropyModel:
    return EntropyModel("two_param", deformation=deformation, r=r, rho_floor=rho_floor)


def tsallis(q: float, rho_floor: float = RHO_FLOOR) -> EntropyModel:
    return EntropyModel("tsallis", q=q, rho_floor=rho_floor)


def kaniadakis(deformation: float, rho_floor: float = RHO_FLOOR) -> EntropyModel:
    return EntropyModel("kaniadakis", deformation=deformation, rho_floor=rho_floor)


def eip(kappa_e: float, drift: str = "linear_drift", rho_floor: float = RHO_FLOOR) -> EntropyModel:
    return EntropyModel("eip", kappa_e=kappa_e, drift=drift, rho_floor=rho_floor)


def deformed_log_parameters(model: EntropyModel) -> Tuple[float, float]:
    """
    Maps the power-law members of the catalog onto the (kappa, r) deformed logarithm.

    BG is (0, 0), Kaniadakis is (kappa, 0) and Tsallis is (|q - 1| / 2, (q - 1) / 2).

    Args:
        model: A 'bg', 'two_param', 'tsallis' or 'kaniadakis' model

    Returns:
        The (kappa, r) pair
    """
    if model.variant == "bg":
        return 0.0, 0.0
    if model.variant == "two_param":
        return float(model.deformation), float(model.r)
    if model.variant == "kaniadakis":
        return float(model.deformation), 0.0
    if model.variant == "tsallis":
        r = 0.5 * (model.q - 1.0)
        return abs(r), r
    raise ConfigurationError(f"Model variant '{model.variant}' is not a deformed logarithm")


def _bg_limit(model: EntropyModel) -> bool:
    if model.variant == "bg":
        return True
    if model.variant == "tsallis":
        return abs(model.q - 1.0) < BG_LIMIT_THRESHOLD
    return abs(model.deformation) < BG_LIMIT_THRESHOLD


def lambda_alpha(deformation: float, r: float) -> Tuple[float, float]:
    """
    Constants lambda and alpha fixing the deformed logarithm ln kappa(rho) = lambda ln_{kappa,r}(rho / alpha).

    Args:
        deformation: kappa
        r: r

    Returns:
        (lambda, alpha)
    """
    k = deformation
    if abs(k) < BG_LIMIT_THRESHOLD:
        raise ConfigurationError("lambda and alpha are indeterminate at vanishing deformation")
    a, b = 1 + r + k, 1 + r - k
    lam = b ** ((r + k) / (2 * k)) / a ** ((r - k) / (2 * k))
    alpha = (b / a) ** (1 / (2 * k))
    return lam, alpha


def deformed_log(x: ArrayLike, deformation: float, r: float) -> ArrayLike:
    """Bi-parametric logarithm ln_{kappa,r}(x) = x^r (x^kappa - x^-kappa) / (2 kappa)."""
    x = np.asarray(x, dtype=float)
    k = deformation
    if abs(k) < BG_LIMIT_THRESHOLD:
        return x ** r * np.log(x)
    return x ** r * (x ** k - x ** (-k)) / (2 * k)


def _check_density(rho: ArrayLike) -> np.ndarray:
    rho = np.asarray(rho, dtype=float)
    if np.any(~np.isfinite(rho)):
        raise DomainError("Density contains non-finite values")
    if np.any(rho < NEGATIVE_DENSITY_LIMIT):
        raise DomainError(f"Density must be non-negative, found minimum {np.min(rho):.3g}")
    return rho


def _floored(model: EntropyModel, rho: ArrayLike, floor: Optional[float]) -> np.ndarray:
    rho = _check_density(rho)
    return np.maximum(rho, model.rho_floor if floor is None else floor)


def ln_kappa(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """
    Logarithm of the entropy generating functional, ln kappa(rho).

    Args:
        model: Catalog entry
        rho: Density values, floored at the model's rho_floor (or floor if given)
        floor: Optional override of the model's floor

    Returns:
        ln kappa evaluated pointwise

    Example:
        >>> ln_kappa(bg(), 1.0)
        1.0
    """
    rho = _floored(model, rho, floor)
    if model.variant == "eip":
        return np.log(rho) - np.log1p(model.kappa_e * rho)
    k, r = deformed_log_parameters(model)
    if _bg_limit(model):
        return rho ** r * (1 + (1 + r) * np.log(rho))
    a, b = 1 + r + k, 1 + r - k
    return (a * rho ** (r + k) - b * rho ** (r - k)) / (2 * k)


def d_ln_kappa(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """First density derivative of ln kappa(rho)."""
    rho = _floored(model, rho, floor)
    if model.variant == "eip":
        return 1 / (rho * (1 + model.kappa_e * rho))
    k, r = deformed_log_parameters(model)
    if _bg_limit(model):
        return rho ** (r - 1) * ((1 + 2 * r) + r * (1 + r) * np.log(rho))
    a, b = 1 + r + k, 1 + r - k
    return (a * (r + k) * rho ** (r + k - 1) - b * (r - k) * rho ** (r - k - 1)) / (2 * k)


def d2_ln_kappa(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """Second density derivative of ln kappa(rho)."""
    rho = _floored(model, rho, floor)
    if model.variant == "eip":
        return -1 / rho ** 2 + model.kappa_e ** 2 / (1 + model.kappa_e * rho) ** 2
    k, r = deformed_log_parameters(model)
    if _bg_limit(model):
        inner = (1 + 2 * r) + r * (1 + r) * np.log(rho)
        return rho ** (r - 2) * ((r - 1) * inner + r * (1 + r))
    a, b = 1 + r + k, 1 + r - k
    return (
        a * (r + k) * (r + k - 1) * rho ** (r + k - 2)
        - b * (r - k) * (r - k - 1) * rho ** (r - k - 2)
    ) / (2 * k)


def gamma_drift(model: EntropyModel, rho: ArrayLike) -> ArrayLike:
    """
    Drift functional gamma(rho); gamma(0) = 0 for every model.

    Args:
        model: Catalog entry
        rho: Non-negative density values

    Returns:
        rho for linear drift, rho (1 + kappa_e rho) for the EIP nonlinear drift
    """
    rho = _check_density(rho)
    if model.linear_drift:
        return rho.copy() if rho.ndim else float(rho)
    return rho * (1 + model.kappa_e * rho)


def d_gamma(model: EntropyModel, rho: ArrayLike) -> ArrayLike:
    """Density derivative of gamma(rho)."""
    rho = _check_density(rho)
    if model.linear_drift:
        return np.ones_like(rho)
    return 1 + 2 * model.kappa_e * rho


def drift_ratio(model: EntropyModel, rho: ArrayLike) -> ArrayLike:
    """gamma(rho) / rho without dividing by the density."""
    rho = _check_density(rho)
    if model.linear_drift:
        return np.ones_like(rho)
    return 1 + model.kappa_e * rho


def f_diffusion(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """
    Nonlinear diffusion coefficient f(rho) = gamma(rho) d ln kappa / d rho.

    Args:
        model: Catalog entry
        rho: Density values
        floor: Optional override of the model's floor

    Returns:
        f evaluated pointwise

    Example:
        >>> f_diffusion(tsallis(2.0), 0.5)
        1.0
    """
    rho_f = _floored(model, rho, floor)
    return drift_ratio(model, rho_f) * rho_f * d_ln_kappa(model, rho_f, floor)


def f_tilde(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """rho d ln kappa / d rho, the diffusion coefficient for linear drift."""
    rho_f = _floored(model, rho, floor)
    return rho_f * d_ln_kappa(model, rho_f, floor)


def f1(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """gamma(rho) (d ln kappa / d rho)^2."""
    rho_f = _floored(model, rho, floor)
    return gamma_drift(model, rho_f) * d_ln_kappa(model, rho_f, floor) ** 2


def f2(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """Half the density derivative of f1."""
    rho_f = _floored(model, rho, floor)
    dl = d_ln_kappa(model, rho_f, floor)
    return 0.5 * (
        d_gamma(model, rho_f) * dl ** 2
        + 2 * gamma_drift(model, rho_f) * dl * d2_ln_kappa(model, rho_f, floor)
    )


def f1_tilde(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """rho (d ln kappa / d rho)^2."""
    rho_f = _floored(model, rho, floor)
    return rho_f * d_ln_kappa(model, rho_f, floor) ** 2


def f2_tilde(model: EntropyModel, rho: ArrayLike, floor: Optional[float] = None) -> ArrayLike:
    """Half the density derivative of f1_tilde."""
    rho_f = _floored(model, rho, floor)
    dl = d_ln_kappa(model, rho_f, floor)
    return 0.5 * (dl ** 2 + 2 * rho_f * dl * d2_ln_kappa(model, rho_f, floor))


def phi_antiderivative(model: EntropyModel, rho: ArrayLike) -> ArrayLike:
    """
    Closed form of the integral of ln kappa from 0 to rho, the (negated) entropy density.

    Args:
        model: Catalog entry
        rho: Non-negative densities; exact zeros contribute zero

    Returns:
        Antiderivative values
    """
    rho = np.maximum(_check_density(rho), 0.0)
    positive = rho > 0
    safe = np.where(positive, rho, 1.0)
    if model.variant == "eip":
        ke = model.kappa_e
        if ke == 0:
            out = safe * np.log(safe) - safe
        else:
            out = safe * np.log(safe) - (1 + ke * safe) * np.log1p(ke * safe) / ke
    else:
        k, r = deformed_log_parameters(model)
        if _bg_limit(model):
            out = safe ** (1 + r) * np.log(safe)
        else:
            out = (safe ** (1 + r + k) - safe ** (1 + r - k)) / (2 * k)
    return np.where(positive, out, 0.0)


def f_antiderivative(model: EntropyModel, rho: ArrayLike) -> ArrayLike:
    """
    Closed form F(rho) with dF/drho = f(rho), normalized so F(0) = 0 when finite.

    Args:
        model: Catalog entry
        rho: Non-negative densities

    Returns:
        F values
    """
    rho = np.maximum(_check_density(rho), 0.0)
    if model.variant == "eip":
        ke = model.kappa_e
        if not model.linear_drift or ke == 0:
            return rho.copy() if rho.ndim else float(rho)
        return np.log1p(ke * rho) / ke
    positive = rho > 0
    safe = np.where(positive, rho, 1.0)
    k, r = deformed_log_parameters(model)
    if _bg_limit(model):
        out = safe ** (1 + r) * (1 + r * np.log(safe))
    else:
        out = ((r + k) * safe ** (1 + r + k) - (r - k) * safe ** (1 + r - k)) / (2 * k)
    return np.where(positive, out, 0.0)


def printed_f(model: EntropyModel, rho: ArrayLike) -> ArrayLike:
    """
    Closed-form diffusion coefficients as tabulated per model, independent of the gamma * ln kappa' path.

    Args:
        model: Catalog entry
        rho: Positive densities

    Returns:
        f values
    """
    rho = np.asarray(rho, dtype=float)
    if model.variant == "bg":
        return np.ones_like(rho)
    if model.variant == "tsallis":
        return model.q * rho ** (model.q - 1)
    if model.variant == "kaniadakis":
        k = model.deformation
        return 0.5 * ((k + 1) * rho ** k - (k - 1) * rho ** (-k))
    if model.variant == "two_param":
        k, r = model.deformation, model.r
        lam, alpha = lambda_alpha(k, r)
        x = rho / alpha
        return lam * ((r + k) * x ** (r + k) - (r - k) * x ** (r - k)) / (2 * k)
    if model.linear_drift:
        return 1 / (1 + model.kappa_e * rho)
    return np.ones_like(rho)


def _monotonic_range(model: EntropyModel) -> Tuple[float, float]:
    if model.variant == "eip":
        if model.kappa_e < 0:
            return 0.0, -1.0 / model.kappa_e
        return 0.0, np.inf
    k, r = deformed_log_parameters(model)
    k = abs(k)
    if k < BG_LIMIT_THRESHOLD:
        if r == 0:
            return 0.0, np.inf
        edge = np.exp(-(1 + 2 * r) / (r * (1 + r)))
        return (edge, np.inf) if r > 0 else (0.0, edge)
    a, b = 1 + r + k, 1 + r - k
    if r - k <= 0 < r + k:
        return 0.0, np.inf
    if r + k == 0:
        return 0.0, np.inf
    edge = ((b * (r - k)) / (a * (r + k))) ** (1 / (2 * k))
    if r - k > 0:
        return float(edge), np.inf
    return 0.0, float(edge)


def monotonic_interval(model: EntropyModel) -> Tuple[float, float]:
    """
    Density interval on which d ln kappa / d rho > 0, i.e. where kappa is invertible.

    Args:
        model: Catalog entry

    Returns:
        (low, high) open interval; (0, inf) for a model invertible on all densities
    """
    return model.monotonic_range


def non_monotonic_subinterval(
    model: EntropyModel, low: float, high: float
) -> Optional[Tuple[float, float]]:
    """
    Part of [low, high] on which the model loses monotonicity, or None when fully admissible.
    """
    lo, hi = model.monotonic_range
    if low <= lo:
        return low, min(lo, high)
    if high >= hi:
        return max(hi, low), high
    return None


def kappa_range(model: EntropyModel) -> Tuple[float, float]:
    """Range (kappa(low+), kappa(high-)) of kappa over its monotonic interval."""
    lo, hi = _search_bracket(model)
    with np.errstate(over="ignore"):
        return (
            float(np.exp(ln_kappa(model, lo, floor=lo))),
            float(np.exp(ln_kappa(model, hi, floor=lo))),
        )


def _search_bracket(model: EntropyModel) -> Tuple[float, float]:
    lo, hi = model.monotonic_range
    lo = max(lo * (1 + 1e-12), INVERSE_BRACKET[0])
    hi = min(hi * (1 - 1e-12), INVERSE_BRACKET[1])
    return lo, hi


def kappa_inverse(
    model: EntropyModel, y: ArrayLike, clip_to_support: bool = False
) -> ArrayLike:
    """
    Inverts kappa(rho) = y.

    BG and EIP use their closed forms; the power-law models use a vectorized bisection on ln kappa
    in log-density, bracketed by the model's monotonic interval.

    Args:
        model: Catalog entry
        y: Positive target values of kappa
        clip_to_support: If True, targets below kappa(0+) (finite for Tsallis q > 1) map to rho = 0
         instead of raising, which gives equilibria with compact support

    Returns:
        rho with kappa(rho) = y

    Example:
        >>> kappa_inverse(eip(1.0), 0.5)
        1.0
    """
    y_arr = np.asarray(y, dtype=float)
    scalar = y_arr.ndim == 0
    y_arr = np.atleast_1d(y_arr)
    if model.variant == "bg":
        interval = (0.0, np.inf)
        _check_targets(y_arr, interval)
        rho = y_arr / np.e
    elif model.variant == "eip":
        ke = model.kappa_e
        interval = (0.0, 1.0 / ke) if ke > 0 else (0.0, np.inf)
        _check_targets(y_arr, interval)
        rho = y_arr / (1 - ke * y_arr)
    else:
        rho = _bisect_inverse(model, y_arr, clip_to_support)
    return float(rho[0]) if scalar else rho


def _check_targets(y: np.ndarray, interval: Tuple[float, float]):
    bad = ~((y > interval[0]) & (y < interval[1]))
    if np.any(bad):
        raise RangeError(f"kappa^-1 target {y[bad][0]:.6g} is outside the range of kappa", interval)


def _bisect_inverse(model: EntropyModel, y: np.ndarray, clip_to_support: bool) -> np.ndarray:
    lo, hi = _search_bracket(model)
    k_lo, k_hi = kappa_range(model)
    if np.any(~(y > 0)):
        raise RangeError("kappa^-1 target must be positive", (k_lo, k_hi))
    target = np.log(y)
    with np.errstate(over="ignore"):
        ln_lo = float(ln_kappa(model, lo, floor=lo))
        ln_hi = float(ln_kappa(model, hi, floor=lo))
    below = target <= ln_lo
    above = target >= ln_hi
    if np.any(above) or (np.any(below) and not clip_to_support):
        bad = y[above | below][0]
        raise RangeError(f"kappa^-1 target {bad:.6g} is outside the range of kappa", (k_lo, k_hi))

    log_lo = np.full_like(target, np.log(lo))
    log_hi = np.full_like(target, np.log(hi))
    for _ in range(BISECTION_ITERATIONS):
        mid = 0.5 * (log_lo + log_hi)
        with np.errstate(over="ignore", invalid="ignore"):
            value = ln_kappa(model, np.exp(mid), floor=lo)
        upper = value > target
        log_hi = np.where(upper, mid, log_hi)
        log_lo = np.where(upper, log_lo, mid)
        if np.all(log_hi - log_lo <= 1e-14 * np.maximum(1.0, np.abs(log_lo))):
            break
    rho = np.exp(0.5 * (log_lo + log_hi))
    return np.where(below, 0.0, rho)


@dataclass(frozen=True)
class DerivedFunctionals:
    """Evaluators for every functional derived from kappa(rho) and gamma(rho) of one model."""

    model: EntropyModel
    ln_kappa: Callable
    d_ln_kappa: Callable
    d2_ln_kappa: Callable
    gamma: Callable
    d_gamma: Callable
    f: Callable
    f_tilde: Callable
    f1: Callable
    f2: Callable
    f1_tilde: Callable
    f2_tilde: Callable
    F: Callable
    phi: Callable


def derived_functionals(model: EntropyModel) -> DerivedFunctionals:
    """
    Bundles the derived functionals of a model as closures over the model.

    Args:
        model: Catalog entry

    Returns:
        DerivedFunctionals whose members take a density array (and optional floor)
    """

    def bind(func):
        return lambda rho, *args, **kwargs: func(model, rho, *args, **kwargs)

    return DerivedFunctionals(
        model=model,
        ln_kappa=bind(ln_kappa),
        d_ln_kappa=bind(d_ln_kappa),
        d2_ln_kappa=bind(d2_ln_kappa),
        gamma=bind(gamma_drift),
        d_gamma=bind(d_gamma),
        f=bind(f_diffusion),
        f_tilde=bind(f_tilde),
        f1=bind(f1),
        f2=bind(f2),
        f1_tilde=bind(f1_tilde),
        f2_tilde=bind(f2_tilde),
        F=bind(f_antiderivative),
        phi=bind(phi_antiderivative),
    )


def entropy_density(model: EntropyModel, rho: ArrayLike) -> ArrayLike:
    """Trace-form entropy density s(rho) = - integral of ln kappa from 0 to rho."""
    return -phi_antiderivative(model, rho)


def catalog_table(
    model: EntropyModel,
    rho: Optional[np.ndarray] = None,
) -> pd.DataFrame:
    """
    Tabulates every derived functional of a model over a density grid.

    Args:
        model: Catalog entry
        rho: Density grid; defaults to a log-spaced grid inside the model's monotonic interval

    Returns:
        pandas DataFrame with one row per density value

    Example:
        >>> catalog_table(bg())["f"].unique()
        array([1.])
    """
    if rho is None:
        lo, hi = model.monotonic_range
        rho = np.logspace(np.log10(CATALOG_RHO_MIN), np.log10(CATALOG_RHO_MAX), CATALOG_POINTS)
        rho = rho[(rho > lo) & (rho < hi)]
    rho = np.asarray(rho, dtype=float)
    fun = derived_functionals(model)
    return pd.DataFrame(
        {
            "rho": rho,
            "ln_kappa": fun.ln_kappa(rho),
            "gamma": fun.gamma(rho),
            "d_gamma": fun.d_gamma(rho),
            "f": fun.f(rho),
            "f_tilde": fun.f_tilde(rho),
            "f1": fun.f1(rho),
            "f2": fun.f2(rho),
            "f1_tilde": fun.f1_tilde(rho),
            "f2_tilde": fun.f2_tilde(rho),
            "F": fun.F(rho),
            "entropy_density": entropy_density(model, rho),
        }
    )


def make_model(
    variant: str,
    deformation: float = 0.0,
    r: float = 0.0,
    q: float = 1.0,
    kappa_e: float = 0.0,
    drift: str = "linear_drift",
    rho_floor: float = RHO_FLOOR,
) -> EntropyModel:
    """Builds a catalog entry from flat parameters, as read from a scenario file."""
    model = EntropyModel(
        variant=variant,
        deformation=deformation,
        r=r,
        q=q,
        kappa_e=kappa_e,
        drift=drift,
        rho_floor=rho_floor,
    )
    lo, hi = model.monotonic_range
    if lo > 0 or np.isfinite(hi):
        logger.info("%s is invertible only for %g < rho < %g", model.label, lo, hi)
    return model
