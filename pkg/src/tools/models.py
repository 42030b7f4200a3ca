"""
Closed-form scalability models.

Amdahl, Gustafson and the universal scalability law (USL) in throughput
space, their latency-space counterparts, and the extrema of each. Every
function is pure; ``p`` may be a single integer or an integer numpy array,
scalar input returns a Python float.
"""
import math
from dataclasses import dataclass
from typing import Tuple, Union

import numpy as np

from src.tools.errors import DomainError, NoFiniteMaximumError

ProcessorCount = Union[int, np.ndarray]


@dataclass(frozen=True)
class ModelParams:
    """The (sigma, kappa) pair defining one USL instance."""
    sigma: float
    kappa: float = 0.0

    def __post_init__(self):
        _check_fraction(self.sigma, "sigma")
        _check_nonnegative(self.kappa, "kappa")

    @property
    def family(self) -> str:
        """Name of the simplest model family this instance belongs to."""
        if self.kappa > 0:
            return "usl"
        if self.sigma > 0:
            return "amdahl"
        return "ideal"

    def to_dict(self):
        return {"sigma": self.sigma, "kappa": self.kappa}


@dataclass(frozen=True)
class LatencyParams:
    """Uniprocessor time t1 plus the (sigma, kappa) pair."""
    t1: float
    sigma: float = 0.0
    kappa: float = 0.0

    def __post_init__(self):
        if not math.isfinite(self.t1) or self.t1 <= 0:
            raise DomainError(f"t1 must be positive, got {self.t1}")
        _check_fraction(self.sigma, "sigma")
        _check_nonnegative(self.kappa, "kappa")

    @property
    def model_params(self) -> ModelParams:
        return ModelParams(self.sigma, self.kappa)


@dataclass(frozen=True)
class Optimum:
    """Real-valued extremum location and the best integer processor count."""
    location: float
    p_opt: int
    value: float

    def to_dict(self):
        return {"location": self.location, "p_opt": self.p_opt, "value": self.value}


@dataclass(frozen=True)
class SimplifiedExtrema:
    """Extrema of f(p) = p / (1 + p + p^2)."""
    maximum: Tuple[float, float]
    minimum: Tuple[float, float]
    grid_argmax: float = None
    grid_step: float = None


def _check_fraction(value, name):
    if not math.isfinite(value) or value < 0 or value > 1:
        raise DomainError(f"{name} must lie in [0, 1], got {value}")


def _check_nonnegative(value, name):
    if not math.isfinite(value) or value < 0:
        raise DomainError(f"{name} must be non-negative, got {value}")


def _processors(p: ProcessorCount) -> np.ndarray:
    arr = np.asarray(p)
    if arr.dtype.kind not in "iu":
        if arr.dtype.kind != "f" or not np.all(np.isfinite(arr)) or np.any(arr != np.floor(arr)):
            raise DomainError(f"processor count must be an integer, got {p}")
    if arr.size and np.any(arr < 1):
        raise DomainError(f"processor count must be >= 1, got {p}")
    return arr.astype(float)


def _out(value):
    if np.ndim(value) == 0:
        return float(value)
    return value


def _resolve_integer(location: float, evaluate, prefer) -> Tuple[int, float]:
    """Pick the better of floor/ceil(location), clamped to p >= 1, ties to smaller p."""
    lower = max(1, math.floor(location))
    upper = max(1, math.ceil(location))
    lower_value = evaluate(lower)
    if upper == lower:
        return lower, lower_value
    upper_value = evaluate(upper)
    if prefer(upper_value, lower_value):
        return upper, upper_value
    return lower, lower_value


def amdahl_speedup(sigma: float, p: ProcessorCount):
    """S_p = p / (1 + sigma (p - 1))."""
    _check_fraction(sigma, "sigma")
    n = _processors(p)
    return _out(n / (1.0 + sigma * (n - 1.0)))


def amdahl_asymptote(sigma: float) -> float:
    """Saturation level 1/sigma approached as p grows without bound."""
    _check_fraction(sigma, "sigma")
    if sigma <= 0:
        raise DomainError("Amdahl asymptote is infinite for sigma = 0")
    return 1.0 / sigma


def gustafson_speedup(sigma: float, p: ProcessorCount):
    """Scaled speedup sigma + (1 - sigma) p."""
    _check_fraction(sigma, "sigma")
    n = _processors(p)
    return _out(sigma + (1.0 - sigma) * n)


def usl_capacity(params: ModelParams, p: ProcessorCount):
    """Relative capacity C_p = p / (1 + sigma (p - 1) + kappa p (p - 1))."""
    n = _processors(p)
    return _out(n / (1.0 + params.sigma * (n - 1.0) + params.kappa * n * (n - 1.0)))


def pairwise_speedup(kappa: float, p: ProcessorCount):
    """One-parameter speedup p / (1 + kappa p (p - 1))."""
    return usl_capacity(ModelParams(0.0, kappa), p)


def efficiency(params: ModelParams, p: ProcessorCount):
    """Capacity per processor, C_p / p."""
    n = _processors(p)
    return _out(usl_capacity(params, n) / n)


def usl_pstar(params: ModelParams) -> Optimum:
    """
    Locate the capacity maximum p* = sqrt((1 - sigma) / kappa).

    The integer optimum is whichever of floor(p*) and ceil(p*) (never below
    one processor) gives the larger capacity, ties going to the smaller p.

    Raises:
        NoFiniteMaximumError: when kappa is zero
    """
    if params.kappa == 0:
        raise NoFiniteMaximumError("kappa = 0: capacity grows without a finite maximum")
    location = math.sqrt((1.0 - params.sigma) / params.kappa)
    p_opt, value = _resolve_integer(
        location,
        lambda q: usl_capacity(params, q),
        lambda candidate, incumbent: candidate > incumbent,
    )
    return Optimum(location=location, p_opt=p_opt, value=value)


def latency_pairwise(t1: float, kappa: float, p: ProcessorCount):
    """T_p = T_1/p + kappa (T_1/2) (p - 1)."""
    if not math.isfinite(t1) or t1 <= 0:
        raise DomainError(f"t1 must be positive, got {t1}")
    if not math.isfinite(kappa) or kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    n = _processors(p)
    return _out(t1 / n + kappa * (t1 / 2.0) * (n - 1.0))


def latency_pairwise_minimum(kappa: float) -> float:
    """Real minimum of latency_pairwise, sqrt(2/kappa)."""
    if not math.isfinite(kappa) or kappa <= 0:
        raise DomainError(f"kappa must be positive, got {kappa}")
    return math.sqrt(2.0 / kappa)


def latency_two_param(lp: LatencyParams, p: ProcessorCount):
    """
    T_p = T_1/p + sigma T_1 (p - 1)/p + kappa T_1 (p - 1).

    kappa carries the absorbed factor of two, so t1 / T_p is exactly the
    USL capacity for the same (sigma, kappa).
    """
    n = _processors(p)
    t1 = lp.t1
    return _out(t1 / n + lp.sigma * t1 * (n - 1.0) / n + lp.kappa * t1 * (n - 1.0))


def speedup_from_latency(lp: LatencyParams, p: ProcessorCount):
    """Speedup T_1 / T_p for the two-parameter latency."""
    return _out(lp.t1 / latency_two_param(lp, p))


def latency_two_param_minimum(lp: LatencyParams) -> Optimum:
    """Minimum latency; it sits at the capacity maximum p*."""
    if lp.kappa == 0:
        raise NoFiniteMaximumError("kappa = 0: latency decreases without a finite minimum")
    location = math.sqrt((1.0 - lp.sigma) / lp.kappa)
    p_opt, value = _resolve_integer(
        location,
        lambda q: latency_two_param(lp, q),
        lambda candidate, incumbent: candidate < incumbent,
    )
    return Optimum(location=location, p_opt=p_opt, value=value)


def simplified_rational(p):
    """f(p) = p / (1 + p + p^2), defined over the reals."""
    x = np.asarray(p, dtype=float)
    return _out(x / (1.0 + x + x * x))


def simplified_extrema_check(grid_step: float = None, grid_upper: float = 100.0) -> SimplifiedExtrema:
    """
    Extrema of p / (1 + p + p^2).

    The stationary points are the roots of the derivative's numerator
    1 - p^2. With ``grid_step`` the positive maximum is also located by a
    brute-force scan over (0, grid_upper].
    """
    roots = np.sort(np.real(np.roots([-1.0, 0.0, 1.0])))
    values = [simplified_rational(r) for r in roots]
    top = int(np.argmax(values))
    bottom = int(np.argmin(values))
    maximum = (float(roots[top]), values[top])
    minimum = (float(roots[bottom]), values[bottom])

    grid_argmax = None
    if grid_step is not None:
        if grid_step <= 0:
            raise DomainError(f"grid step must be positive, got {grid_step}")
        grid = np.arange(1, int(round(grid_upper / grid_step)) + 1) * grid_step
        grid_argmax = float(grid[np.argmax(simplified_rational(grid))])
    return SimplifiedExtrema(maximum=maximum, minimum=minimum,
                             grid_argmax=grid_argmax, grid_step=grid_step)
