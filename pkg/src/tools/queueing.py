"""
Machine-repairman queueing model.

p machines alternate between an up period (mean Z) and a single-server
repair station (mean service S). This module carries the exact mean-value
solution, the synchronous bound, the state-dependent generalization
S' = c S, and executable forms of the identities linking the repairman to
the Amdahl, Gustafson and USL scalability models.
"""
import math
from dataclasses import dataclass
from typing import Tuple

import numpy as np

from src.tools.errors import DomainError
from src.tools.models import (
    ModelParams,
    ProcessorCount,
    _out,
    _processors,
    amdahl_speedup,
    gustafson_speedup,
    usl_capacity,
)


@dataclass(frozen=True)
class QueueParams:
    """Repairman inputs: service time s, up time z, state-dependence c."""
    s: float
    z: float
    c: float = 0.0

    def __post_init__(self):
        for name in ("s", "z", "c"):
            value = getattr(self, name)
            if not math.isfinite(value) or value < 0:
                raise DomainError(f"{name} must be non-negative, got {value}")

    def require_service(self):
        """s = 0 leaves sigma undefined, so anything needing sigma rejects it."""
        if self.s <= 0:
            raise DomainError("service time s must be positive")
        return self

    def to_dict(self):
        return {"s": self.s, "z": self.z, "c": self.c}


@dataclass(frozen=True)
class QueueSolution:
    """Per-population metrics for n = 1..p; index i holds population i + 1."""
    params: QueueParams
    throughput: np.ndarray
    residence: np.ndarray
    queue_length: np.ndarray

    @property
    def p(self) -> int:
        return len(self.throughput)

    def x(self, n: int) -> float:
        return float(self.throughput[n - 1])

    def r(self, n: int) -> float:
        return float(self.residence[n - 1])

    def q(self, n: int) -> float:
        return float(self.queue_length[n - 1])


@dataclass(frozen=True)
class IdentityCheck:
    """Both sides of an identity and their relative error."""
    name: str
    lhs: np.ndarray
    rhs: np.ndarray

    @property
    def rel_error(self) -> np.ndarray:
        lhs = np.asarray(self.lhs, dtype=float)
        rhs = np.asarray(self.rhs, dtype=float)
        return np.abs(lhs - rhs) / np.abs(rhs)

    @property
    def max_rel_error(self) -> float:
        return float(np.max(self.rel_error))


def serial_fraction(params: QueueParams) -> float:
    """sigma = S / (S + Z); independent of c."""
    params.require_service()
    return params.s / (params.s + params.z)


def service_ratio(params: QueueParams) -> float:
    """
    Z / S, which must agree with (1 - sigma) / sigma.

    Raises:
        DomainError: if s is not positive or the two forms disagree
    """
    params.require_service()
    ratio = params.z / params.s
    sigma = serial_fraction(params)
    via_sigma = (1.0 - sigma) / sigma
    if not math.isclose(ratio, via_sigma, rel_tol=1e-12, abs_tol=1e-300):
        raise DomainError(f"service ratio {ratio} disagrees with (1-sigma)/sigma = {via_sigma}")
    return ratio


def implied_model_params(params: QueueParams) -> ModelParams:
    """The (sigma, kappa) pair implied by (S, Z, c): kappa = c sigma."""
    sigma = serial_fraction(params)
    return ModelParams(sigma, params.c * sigma)


def exact_repairman(params: QueueParams, p: int) -> QueueSolution:
    """
    Exact mean-value solution of the single-server repairman.

    R(n) = S (1 + Q(n - 1)), X(n) = n / (R(n) + Z), Q(n) = X(n) R(n), Q(0) = 0.
    """
    params.require_service()
    p = int(_processors(p))
    throughput = np.empty(p)
    residence = np.empty(p)
    queue_length = np.empty(p)
    q = 0.0
    for n in range(1, p + 1):
        r = params.s * (1.0 + q)
        x = n / (r + params.z)
        q = x * r
        throughput[n - 1] = x
        residence[n - 1] = r
        queue_length[n - 1] = q
    return QueueSolution(params=params, throughput=throughput,
                         residence=residence, queue_length=queue_length)


def birth_death_repairman(params: QueueParams, p: int) -> float:
    """
    Throughput from the birth-death chain of the repair backlog.

    State k is the number of machines at the repair station; failures move
    k -> k + 1 at rate (p - k)/Z, repairs move k -> k - 1 at rate 1/S.
    """
    params.require_service()
    p = int(_processors(p))
    if params.z == 0:
        return 1.0 / params.s
    states = p + 1
    generator = np.zeros((states, states))
    for k in range(states):
        if k < p:
            generator[k, k + 1] = (p - k) / params.z
        if k > 0:
            generator[k, k - 1] = 1.0 / params.s
        generator[k, k] = -generator[k].sum()
    # balance equations pi Q = 0 with the normalization row appended
    system = np.vstack([generator.T, np.ones(states)])
    rhs = np.zeros(states + 1)
    rhs[-1] = 1.0
    pi, *_ = np.linalg.lstsq(system, rhs, rcond=None)
    return float((1.0 - pi[0]) / params.s)


def synchronous_throughput(params: QueueParams, p: ProcessorCount):
    """Synchronous lower bound p / (p S + Z) on the repairman throughput."""
    params.require_service()
    n = _processors(p)
    return _out(n / (n * params.s + params.z))


def state_dependent_residence(params: QueueParams, p: ProcessorCount):
    """R(p) = p (S + (p - 1) S') with S' = c S."""
    params.require_service()
    n = _processors(p)
    return _out(n * (params.s + (n - 1.0) * params.c * params.s))


def synchronous_state_dependent_throughput(params: QueueParams, p: ProcessorCount):
    """p / (R(p) + Z) with the state-dependent synchronous residence."""
    n = _processors(p)
    return _out(n / (state_dependent_residence(params, n) + params.z))


def residence_from_throughput(x, p: ProcessorCount, z: float):
    """R(p) = p / X(p) - Z."""
    if z < 0:
        raise DomainError(f"z must be non-negative, got {z}")
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise DomainError("throughput must be positive")
    return _out(_processors(p) / x - z)


def round_trip_time(residence, z: float):
    """Mean round-trip time R + Z."""
    return _out(np.asarray(residence, dtype=float) + z)


def duality_paths(params: QueueParams, p: ProcessorCount) -> Tuple[float, float]:
    """
    Speedup along both scaling paths from Z/S to Amdahl's law.

    Left: Z -> Z/p with each subtask served in S/p, so R = S.
    Right: Z unchanged with R = p S.
    """
    params.require_service()
    n = _processors(p)
    s, z = params.s, params.z
    left = (s + z) / ((s + z) / n + s - s / n)
    right = n * (s + z) / (n * s + z)
    return _out(left), _out(right)


def usl_from_queue(params: QueueParams, p: ProcessorCount):
    """Synchronous relative throughput with state-dependent service."""
    params.require_service()
    n = _processors(p)
    s, z, c = params.s, params.z, params.c
    return _out(n * (s + z) / (n * s + c * n * (n - 1.0) * s + z))


def gustafson_from_queue(params: QueueParams, p: ProcessorCount):
    """Synchronous capacity after rescaling Z -> p Z."""
    params.require_service()
    n = _processors(p)
    s, z = params.s, params.z
    return _out(n * (s + n * z) / (n * s + n * z))


def markov_serial_fraction(lambda_a: float, lambda_b: float) -> float:
    """
    Stationary probability of the serial state B in a two-state chain.

    lambda_a is the A -> B rate and lambda_b the B -> A rate. With
    lambda_a = 1/Z and lambda_b = 1/S the result is S / (S + Z).
    """
    for name, rate in (("lambda_a", lambda_a), ("lambda_b", lambda_b)):
        if not math.isfinite(rate) or rate <= 0:
            raise DomainError(f"{name} must be positive, got {rate}")
    return lambda_a / (lambda_a + lambda_b)


def main_theorem_check(params: QueueParams, p: ProcessorCount) -> IdentityCheck:
    return IdentityCheck("main_theorem", usl_from_queue(params, p),
                         usl_capacity(implied_model_params(params), p))


def amdahl_corollary_check(params: QueueParams, p: ProcessorCount) -> IdentityCheck:
    synchronous = QueueParams(params.s, params.z, 0.0)
    return IdentityCheck("amdahl_corollary", usl_from_queue(synchronous, p),
                         amdahl_speedup(serial_fraction(params), p))


def gustafson_corollary_check(params: QueueParams, p: ProcessorCount) -> IdentityCheck:
    return IdentityCheck("gustafson_corollary", gustafson_from_queue(params, p),
                         gustafson_speedup(serial_fraction(params), p))


def duality_check(params: QueueParams, p: ProcessorCount) -> Tuple[IdentityCheck, IdentityCheck]:
    """Left path against right path, and left path against Amdahl."""
    left, right = duality_paths(params, p)
    amdahl = amdahl_speedup(serial_fraction(params), p)
    return (IdentityCheck("duality_paths", left, right),
            IdentityCheck("duality_amdahl", left, amdahl))
