"""
Regression of scalability parameters on measured throughput.

Samples (p, X(p)) are normalized to relative capacity C_p = X(p)/X(1) and
the USL is fitted by constrained least squares on the C_p scale. The
nested ideal (no parameters) and Amdahl (sigma only) models are fitted the
same way and the three are compared with a small-sample corrected
information criterion.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import least_squares

from src.tools.errors import DomainError, InsufficientDataError
from src.tools.models import ModelParams, Optimum, usl_capacity, usl_pstar
from src.tools.queueing import residence_from_throughput

logger = logging.getLogger(__name__)

MODELS = ("ideal", "amdahl", "usl")
_MIN_POINTS = {"ideal": 1, "amdahl": 2, "usl": 3}
_FREE_PARAMS = {"ideal": 0, "amdahl": 1, "usl": 2}
SIGMA_CEILING = 1.0 - 1e-12


@dataclass(frozen=True)
class ThroughputSample:
    """One measured point: p processors delivering throughput x."""
    p: int
    x: float

    def __post_init__(self):
        if int(self.p) != self.p or self.p < 1:
            raise DomainError(f"processor count must be a positive integer, got {self.p}")
        if not math.isfinite(self.x) or self.x <= 0:
            raise DomainError(f"throughput must be positive, got {self.x}")


@dataclass(frozen=True)
class FitSettings:
    sigma_grid: int = 21
    kappa_grid: int = 29
    kappa_min: float = 1e-8
    kappa_max: float = 1.0
    starts: int = 3
    max_nfev: int = 2000
    tolerance: float = 1e-15
    identifiability_threshold: float = 0.01

    @classmethod
    def from_dict(cls, values: Optional[dict]) -> "FitSettings":
        values = values or {}
        known = {key: values[key] for key in cls.__dataclass_fields__ if key in values}
        return cls(**known)


@dataclass(frozen=True)
class ModelScore:
    model: str
    params: ModelParams
    rss: float
    aicc: float
    converged: bool = True

    def to_dict(self):
        return {
            "model": self.model,
            "sigma": self.params.sigma,
            "kappa": self.params.kappa,
            "rss": self.rss,
            "aicc": self.aicc if math.isfinite(self.aicc) else None,
            "converged": self.converged,
        }


@dataclass(frozen=True)
class FitResult:
    params: ModelParams
    model: str
    x1_used: Optional[float]
    rss: float
    r_squared: float
    p_star: Optional[Optimum]
    model_choice: str
    scores: Dict[str, ModelScore]
    converged: bool
    n_points: int
    residuals: Tuple[float, ...] = ()
    warnings: Tuple[str, ...] = ()

    def to_dict(self):
        return {
            "model": self.model,
            "sigma": self.params.sigma,
            "kappa": self.params.kappa,
            "x1_used": self.x1_used,
            "rss": self.rss,
            "r_squared": self.r_squared,
            "p_star": self.p_star.to_dict() if self.p_star else None,
            "model_choice": self.model_choice,
            "scores": {name: score.to_dict() for name, score in self.scores.items()},
            "converged": self.converged,
            "n_points": self.n_points,
            "residuals": list(self.residuals),
            "warnings": list(self.warnings),
        }


@dataclass(frozen=True)
class Prediction:
    rows: List[Tuple[int, float, float]]
    p_star: Optional[Optimum]
    retrograde: bool
    warnings: Tuple[str, ...] = field(default_factory=tuple)


def normalize(samples: Sequence[ThroughputSample], baseline: Optional[float] = None) -> Tuple[List[Tuple[int, float]], float]:
    """
    Convert samples to (p, C_p) pairs.

    The baseline is the explicit ``baseline`` if given, otherwise the mean of
    the p = 1 samples. Repeated p = 1 samples collapse into one point; any
    other repeated p is an error.

    Returns:
        The normalized points, sorted by p, and the baseline used
    """
    seen = {}
    ones = []
    for sample in samples:
        if sample.p == 1:
            ones.append(sample.x)
            continue
        if sample.p in seen:
            raise DomainError(f"duplicate samples for p = {sample.p}")
        seen[sample.p] = sample.x

    if baseline is None:
        if not ones:
            raise DomainError("no p = 1 sample and no explicit baseline")
        baseline = float(np.mean(ones))
    elif not math.isfinite(baseline) or baseline <= 0:
        raise DomainError(f"baseline must be positive, got {baseline}")

    points = [(p, x / baseline) for p, x in seen.items()]
    if ones:
        points.append((1, float(np.mean(ones)) / baseline))
    return sorted(points), baseline


def _arrays(points, model: str) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray([point[0] for point in points], dtype=float)
    c = np.asarray([point[1] for point in points], dtype=float)
    if len(np.unique(p)) != len(p):
        raise DomainError("points must have distinct p values")
    if np.any(p < 1) or np.any(c <= 0):
        raise DomainError("points need p >= 1 and positive capacity")
    if len(p) < _MIN_POINTS[model]:
        raise InsufficientDataError(
            f"{model} fit needs at least {_MIN_POINTS[model]} distinct p values, got {len(p)}")
    return p, c


def _rss(sigma, kappa, p, c) -> float:
    residual = p / (1.0 + sigma * (p - 1.0) + kappa * p * (p - 1.0)) - c
    return float(residual @ residual)


def _rss_floor(c: np.ndarray) -> float:
    """Residual level indistinguishable from rounding noise."""
    return len(c) * (1e-12 * float(np.max(np.abs(c)))) ** 2


def _aicc(rss: float, n: int, model: str, floor: float) -> float:
    """Gaussian-residual AICc; infinite when n leaves no degrees of freedom for the correction."""
    k = _FREE_PARAMS[model]
    if n - k - 1 <= 0:
        return math.inf
    return n * math.log(max(rss, floor) / n) + 2 * k + 2 * k * (k + 1) / (n - k - 1)


def _refine(x0, lower, upper, residual, jacobian, settings: FitSettings):
    result = least_squares(
        residual, x0, jac=jacobian, bounds=(lower, upper), method="trf",
        x_scale="jac", ftol=settings.tolerance, xtol=settings.tolerance,
        gtol=settings.tolerance, max_nfev=settings.max_nfev,
    )
    return np.clip(result.x, lower, upper), result.status > 0


def _best(candidates, floor):
    """Lowest rss wins; candidates earlier in the list win near-ties."""
    best = candidates[0]
    for candidate in candidates[1:]:
        if candidate[1] + floor < best[1]:
            best = candidate
    return best


def _fit_sigma(p, c, kappa, settings: FitSettings, floor: float):
    """Best sigma in [0, 1) for a fixed kappa; sigma = 0 is always a candidate."""
    grid = np.linspace(0.0, 0.99, settings.sigma_grid)
    start = grid[int(np.argmin([_rss(s, kappa, p, c) for s in grid]))]

    def residual(theta):
        return p / (1.0 + theta[0] * (p - 1.0) + kappa * p * (p - 1.0)) - c

    def jacobian(theta):
        d = 1.0 + theta[0] * (p - 1.0) + kappa * p * (p - 1.0)
        return (-p * (p - 1.0) / d ** 2).reshape(-1, 1)

    theta, converged = _refine([start], [0.0], [SIGMA_CEILING], residual, jacobian, settings)
    candidates = [(0.0, _rss(0.0, kappa, p, c), True),
                  (float(theta[0]), _rss(theta[0], kappa, p, c), converged)]
    return _best(candidates, floor)


def _fit_kappa(p, c, settings: FitSettings, floor: float):
    """Best kappa >= 0 with sigma pinned at zero."""
    grid = np.logspace(math.log10(settings.kappa_min), math.log10(settings.kappa_max), settings.kappa_grid)
    start = grid[int(np.argmin([_rss(0.0, k, p, c) for k in grid]))]

    def residual(theta):
        return p / (1.0 + theta[0] * p * (p - 1.0)) - c

    def jacobian(theta):
        d = 1.0 + theta[0] * p * (p - 1.0)
        return (-p * p * (p - 1.0) / d ** 2).reshape(-1, 1)

    theta, converged = _refine([start], [0.0], [np.inf], residual, jacobian, settings)
    return float(theta[0]), _rss(0.0, theta[0], p, c), converged


def _fit_usl_interior(p, c, settings: FitSettings):
    """Multi-start grid over (sigma, log kappa) followed by local refinement."""
    sigmas = np.linspace(0.0, 0.99, settings.sigma_grid)
    kappas = np.concatenate(([0.0], np.logspace(math.log10(settings.kappa_min),
                                                math.log10(settings.kappa_max), settings.kappa_grid)))
    s_grid, k_grid = np.meshgrid(sigmas, kappas, indexing="ij")
    model = p / (1.0 + s_grid[..., None] * (p - 1.0) + k_grid[..., None] * p * (p - 1.0))
    surface = np.sum((model - c) ** 2, axis=-1).ravel()
    order = np.argsort(surface, kind="stable")[:settings.starts]

    def residual(theta):
        return p / (1.0 + theta[0] * (p - 1.0) + theta[1] * p * (p - 1.0)) - c

    def jacobian(theta):
        d = 1.0 + theta[0] * (p - 1.0) + theta[1] * p * (p - 1.0)
        scale = -p / d ** 2
        return np.column_stack((scale * (p - 1.0), scale * p * (p - 1.0)))

    best = None
    for index in order:
        start = [s_grid.ravel()[index], k_grid.ravel()[index]]
        theta, converged = _refine(start, [0.0, 0.0], [SIGMA_CEILING, np.inf], residual, jacobian, settings)
        rss = _rss(theta[0], theta[1], p, c)
        if best is None or rss < best[1]:
            best = ((float(theta[0]), float(theta[1])), rss, converged)
    return best


def _score_all(p, c, settings: FitSettings) -> Dict[str, ModelScore]:
    n = len(p)
    floor = _rss_floor(c)
    scores = {"ideal": ModelScore("ideal", ModelParams(0.0, 0.0), _rss(0.0, 0.0, p, c),
                                  _aicc(_rss(0.0, 0.0, p, c), n, "ideal", floor))}
    if n < _MIN_POINTS["amdahl"]:
        return scores

    sigma, rss, converged = _fit_sigma(p, c, 0.0, settings, floor)
    scores["amdahl"] = ModelScore("amdahl", ModelParams(sigma, 0.0), rss,
                                  _aicc(rss, n, "amdahl", floor), converged)
    if n < _MIN_POINTS["usl"]:
        return scores

    amdahl = scores["amdahl"]
    kappa_only, kappa_rss, kappa_converged = _fit_kappa(p, c, settings, floor)
    interior, interior_rss, interior_converged = _fit_usl_interior(p, c, settings)
    # boundary solutions are listed first so they win near-ties
    candidates = [
        ((0.0, 0.0), scores["ideal"].rss, True),
        ((amdahl.params.sigma, 0.0), amdahl.rss, amdahl.converged),
        ((0.0, kappa_only), kappa_rss, kappa_converged),
        (interior, interior_rss, interior_converged),
    ]
    (sigma, kappa), rss, converged = _best(candidates, floor)
    scores["usl"] = ModelScore("usl", ModelParams(sigma, kappa), rss,
                               _aicc(rss, n, "usl", floor), converged)
    return scores


def _choose(scores: Dict[str, ModelScore]) -> str:
    choice = "ideal"
    for name in MODELS[1:]:
        if name in scores and scores[name].aicc < scores[choice].aicc:
            choice = name
    return choice


def select_model(points, settings: FitSettings = FitSettings()) -> Tuple[str, Dict[str, ModelScore]]:
    """
    Fit ideal, Amdahl and USL and pick the lowest AICc.

    Each larger model's feasible set contains the smaller one's solution, so
    its rss is never worse. Ties in score go to the simpler model.
    """
    p, c = _arrays(points, "usl")
    scores = _score_all(p, c, settings)
    return _choose(scores), scores


def fit_model(points, model: str = "auto", x1: Optional[float] = None,
              settings: FitSettings = FitSettings()) -> FitResult:
    """
    Fit one model family, or the selected one with ``model="auto"``.

    Args:
        points: (p, C_p) pairs
        model: one of auto, ideal, amdahl, usl
        x1: baseline throughput the points were normalized by, echoed back

    Raises:
        InsufficientDataError: when there are too few distinct p values
    """
    if model not in MODELS + ("auto",):
        raise DomainError(f"unknown model '{model}'")
    p, c = _arrays(points, "usl" if model == "auto" else model)
    scores = _score_all(p, c, settings)
    choice = _choose(scores)
    chosen = scores[choice if model == "auto" else model]

    params = chosen.params
    fitted = usl_capacity(params, p)
    residuals = fitted - c
    total = float(np.sum((c - np.mean(c)) ** 2))
    r_squared = 1.0 - chosen.rss / total if total > 0 else (1.0 if chosen.rss <= _rss_floor(c) else 0.0)

    warnings = []
    p_star = None
    if params.kappa > 0:
        p_star = usl_pstar(params)
        p_max = float(np.max(p))
        coherency = params.kappa * p_max * (p_max - 1.0)
        denominator = 1.0 + params.sigma * (p_max - 1.0) + coherency
        if coherency < settings.identifiability_threshold * denominator:
            warnings.append(
                f"kappa contributes {coherency / denominator:.2%} of the denominator at p={p_max:g}; "
                "samples may not identify it")
    if not chosen.converged:
        warnings.append(f"{chosen.model} refinement did not converge; reporting best iterate")
    for message in warnings:
        logger.warning(message)

    return FitResult(
        params=params,
        model=chosen.model,
        x1_used=x1,
        rss=chosen.rss,
        r_squared=r_squared,
        p_star=p_star,
        model_choice=choice,
        scores=scores,
        converged=chosen.converged,
        n_points=len(p),
        residuals=tuple(float(r) for r in residuals),
        warnings=tuple(warnings),
    )


def fit_usl(points, x1: Optional[float] = None, settings: FitSettings = FitSettings()) -> FitResult:
    """Two-parameter fit with sigma in [0, 1) and kappa >= 0."""
    return fit_model(points, "usl", x1, settings)


def fit_amdahl(points, x1: Optional[float] = None, settings: FitSettings = FitSettings()) -> FitResult:
    return fit_model(points, "amdahl", x1, settings)


def fit_ideal(points, x1: Optional[float] = None, settings: FitSettings = FitSettings()) -> FitResult:
    return fit_model(points, "ideal", x1, settings)


def predict(params: ModelParams, x1: float, p_values: Sequence[int]) -> Prediction:
    """
    Throughput X(p) = x1 C_p for each requested p.

    Flags the prediction as retrograde when any p lies beyond ceil(p*).
    """
    if not math.isfinite(x1) or x1 <= 0:
        raise DomainError(f"baseline throughput must be positive, got {x1}")
    p_array = np.asarray(list(p_values), dtype=int)
    capacity = np.atleast_1d(usl_capacity(params, p_array))
    rows = [(int(p), float(cp), float(x1 * cp)) for p, cp in zip(p_array, capacity)]

    p_star = usl_pstar(params) if params.kappa > 0 else None
    retrograde = bool(p_star is not None and np.any(p_array > math.ceil(p_star.location)))
    warnings = ()
    if retrograde:
        warnings = (f"requested p beyond ceil(p*) = {math.ceil(p_star.location)}: throughput is retrograde",)
    return Prediction(rows=rows, p_star=p_star, retrograde=retrograde, warnings=warnings)


def predict_residence(params: ModelParams, x1: float, z: float, p_values: Sequence[int]) -> List[Tuple[int, float, float]]:
    """(p, X, R) rows with R = p/X - Z from the predicted throughput."""
    rows = predict(params, x1, p_values).rows
    return [(p, x, float(residence_from_throughput(x, p, z))) for p, _, x in rows]
