"""
Discrete-event simulation of the machine-repairman system.

Three synchronization regimes are offered:

- asynchronous: machines fail and queue independently (FIFO, single server)
- barrier: repaired machines are held until all p are repaired, then all
  restart their up periods together
- intermittent: while any machine is in service every up machine is
  suspended; they resume once the repair queue empties

A tour is one repair completion. Rounds are groups of p consecutive tours.
Each machine is a simpy process; the repair station is a single-server
FIFO resource.
"""
import logging
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, replace
from enum import Enum
from typing import Callable, List, Optional

import numpy as np
import simpy
from scipy import stats

from src.tools.errors import SimulationError
from src.tools.queueing import (
    QueueParams,
    exact_repairman,
    state_dependent_residence,
    synchronous_state_dependent_throughput,
)

logger = logging.getLogger(__name__)

_DIST_ALIASES = {
    "det": "deterministic",
    "deterministic": "deterministic",
    "exp": "exponential",
    "exponential": "exponential",
    "lognormal": "lognormal",
    "logn": "lognormal",
}


class SimMode(str, Enum):
    ASYNCHRONOUS = "asynchronous"
    BARRIER = "barrier"
    INTERMITTENT = "intermittent"


@dataclass(frozen=True)
class Distribution:
    """A positive duration distribution given by its mean (and cv for lognormal)."""
    kind: str
    mean: float
    cv: float = 1.0

    def __post_init__(self):
        if self.kind not in ("deterministic", "exponential", "lognormal"):
            raise SimulationError(f"unknown distribution kind: {self.kind}")
        if not math.isfinite(self.mean) or self.mean < 0:
            raise SimulationError(f"distribution mean must be non-negative, got {self.mean}")
        if self.kind == "lognormal" and (not math.isfinite(self.cv) or self.cv <= 0):
            raise SimulationError(f"lognormal cv must be positive, got {self.cv}")

    @classmethod
    def parse(cls, text: str) -> "Distribution":
        """
        Parse ``kind:mean[:cv]``, e.g. ``exp:1``, ``det:9`` or ``lognormal:9:0.5``.
        """
        parts = [part.strip() for part in text.split(":")]
        kind = _DIST_ALIASES.get(parts[0].lower())
        if kind is None or len(parts) not in (2, 3) or (len(parts) == 3 and kind != "lognormal"):
            raise SimulationError(f"invalid distribution spec '{text}' (expected kind:mean[:cv])")
        try:
            values = [float(part) for part in parts[1:]]
        except ValueError:
            raise SimulationError(f"invalid distribution spec '{text}': non-numeric value")
        return cls(kind, *values)

    def label(self) -> str:
        if self.kind == "lognormal":
            return f"lognormal:{self.mean:g}:{self.cv:g}"
        return f"{self.kind}:{self.mean:g}"


class _Sampler:
    """Draws from one distribution using one generator, in blocks."""

    def __init__(self, dist: Distribution, rng: np.random.Generator, block: int = 512):
        self.dist = dist
        self.rng = rng
        self.block = block
        self._buffer = np.empty(0)
        self._index = 0
        if dist.kind == "lognormal":
            self._log_sigma = math.sqrt(math.log1p(dist.cv ** 2))
            self._log_mu = math.log(dist.mean) - 0.5 * self._log_sigma ** 2 if dist.mean > 0 else 0.0

    def _refill(self):
        if self.dist.kind == "exponential":
            self._buffer = self.rng.exponential(self.dist.mean, size=self.block)
        else:
            self._buffer = self.rng.lognormal(self._log_mu, self._log_sigma, size=self.block)
        self._index = 0

    def __call__(self) -> float:
        if self.dist.kind == "deterministic" or self.dist.mean == 0:
            return self.dist.mean
        if self._index >= len(self._buffer):
            self._refill()
        value = self._buffer[self._index]
        self._index += 1
        return float(value)


@dataclass(frozen=True)
class SimConfig:
    p: int
    service_dist: Distribution
    uptime_dist: Distribution
    mode: SimMode = SimMode.ASYNCHRONOUS
    state_dependence_c: float = 0.0
    cycles: int = 100_000
    warmup: int = 1_000
    seed: int = 42
    batches: int = 30
    confidence: float = 0.95
    max_events: Optional[int] = None

    def __post_init__(self):
        if isinstance(self.mode, str) and not isinstance(self.mode, SimMode):
            try:
                object.__setattr__(self, "mode", SimMode(self.mode))
            except ValueError:
                raise SimulationError(f"unknown mode '{self.mode}'")
        if not isinstance(self.p, int) or self.p < 1:
            raise SimulationError(f"p must be a positive integer, got {self.p}")
        if self.service_dist.mean <= 0:
            raise SimulationError("service mean must be positive")
        if not math.isfinite(self.state_dependence_c) or self.state_dependence_c < 0:
            raise SimulationError("state dependence c must be non-negative")
        if self.warmup < 0 or self.cycles <= self.warmup:
            raise SimulationError(f"cycles ({self.cycles}) must exceed warmup ({self.warmup})")
        if self.batches < 2:
            raise SimulationError("at least two batches are needed for a confidence interval")
        if self.cycles - self.warmup < self.batches:
            raise SimulationError("fewer tours than batches after warmup")
        if not 0 < self.confidence < 1:
            raise SimulationError("confidence must lie in (0, 1)")
        if not 0 <= self.seed < 2 ** 64:
            raise SimulationError("seed must be a 64-bit unsigned integer")

    @property
    def event_ceiling(self) -> int:
        if self.max_events is not None:
            return self.max_events
        return 20 * self.cycles + 10 * self.p

    def to_dict(self):
        return {
            "p": self.p,
            "service": self.service_dist.label(),
            "uptime": self.uptime_dist.label(),
            "mode": self.mode.value,
            "c": self.state_dependence_c,
            "cycles": self.cycles,
            "warmup": self.warmup,
            "seed": self.seed,
            "batches": self.batches,
            "confidence": self.confidence,
        }


@dataclass(frozen=True)
class SimOutcome:
    x_hat: float
    r_hat: float
    ci_halfwidth: float
    analytic_reference: Optional[float]
    analytic_residence: Optional[float]
    tours_used: int
    tours_measured: int
    sync_fraction: Optional[float]
    events_processed: int
    mode: str
    p: int
    seed: int

    @property
    def relative_error(self) -> Optional[float]:
        if self.analytic_reference is None:
            return None
        return abs(self.x_hat - self.analytic_reference) / self.analytic_reference

    @property
    def within_ci(self) -> Optional[bool]:
        if self.analytic_reference is None:
            return None
        return abs(self.x_hat - self.analytic_reference) <= self.ci_halfwidth

    def to_dict(self):
        return {
            "x_hat": self.x_hat,
            "r_hat": self.r_hat,
            "ci_halfwidth": self.ci_halfwidth,
            "analytic_reference": self.analytic_reference,
            "analytic_residence": self.analytic_residence,
            "relative_error": self.relative_error,
            "within_ci": self.within_ci,
            "tours_used": self.tours_used,
            "tours_measured": self.tours_measured,
            "sync_fraction": self.sync_fraction,
            "events_processed": self.events_processed,
            "mode": self.mode,
            "p": self.p,
            "seed": self.seed,
        }


Observer = Callable[[float, int, int, int, int], None]

_UP, _QUEUED, _IN_SERVICE, _PARKED = range(4)


class _RepairShop:
    """
    One simulation run: a process per machine sharing one repair station.

    Suspended (intermittent) and held (barrier) machines are both parked.
    Every machine that is not up counts toward the backlog that stretches
    the job in service.
    """

    def __init__(self, config: SimConfig, observer: Optional[Observer] = None):
        self.config = config
        self.p = config.p
        self.c = config.state_dependence_c
        self.mode = config.mode
        self.observer = observer

        root = np.random.SeedSequence(config.seed)
        self.uptime = []
        self.service = []
        for child in root.spawn(self.p):
            up_seq, svc_seq = child.spawn(2)
            self.uptime.append(_Sampler(config.uptime_dist, np.random.default_rng(up_seq)))
            self.service.append(_Sampler(config.service_dist, np.random.default_rng(svc_seq)))

        self.env = simpy.Environment()
        self.station = simpy.Resource(self.env, capacity=1)
        self.barrier = self.env.event()
        self.resume = self.env.event()
        self.finished = self.env.event()

        self.status = [_UP] * self.p
        self.z_drawn = [0.0] * self.p
        self.tour_start = [0.0] * self.p
        self.counted = [False] * self.p
        self.n_up = self.p
        self.n_queued = 0
        self.n_in_service = 0
        self.n_parked = 0
        self.serving = None

        self.processed = 0
        self.completions = 0
        self.completion_clock = [0.0]
        self.epochs = [(0, 0.0)]
        self.residences = []
        self.round_flags = []
        self.all_down = False

        # started in index order so simultaneous first failures queue by machine index
        self.machines = [self.env.process(self._machine(m)) for m in range(self.p)]

    # bookkeeping

    def _move(self, m, status):
        counts = [self.n_up, self.n_queued, self.n_in_service, self.n_parked]
        counts[self.status[m]] -= 1
        counts[status] += 1
        self.n_up, self.n_queued, self.n_in_service, self.n_parked = counts
        self.status[m] = status

    def _count_event(self):
        self.processed += 1
        if self.processed > self.config.event_ceiling:
            raise SimulationError(f"event count exceeded the ceiling of {self.config.event_ceiling}")

    def _record(self, finished_tour: bool = False):
        down_now = self.n_up == 0
        if finished_tour and self.completions % self.p == 0:
            self.round_flags.append(self.all_down)
            self.all_down = down_now
        else:
            self.all_down = self.all_down or down_now
        if self.observer is not None:
            self.observer(self.env.now, self.n_up, self.n_queued, self.n_in_service, self.n_parked)

    def _stretch(self) -> float:
        return 1.0 + (self.p - self.n_up - 1) * self.c

    def _open(self, gate: simpy.Event) -> simpy.Event:
        gate.succeed()
        return self.env.event()

    def _restart(self, m):
        """Begin a fresh up period, closing the residence of the tour just served."""
        now = self.env.now
        if self.counted[m]:
            self.residences.append(now - self.tour_start[m] - self.z_drawn[m])
            self.counted[m] = False
        self.z_drawn[m] = self.uptime[m]()
        self.tour_start[m] = now

    # machine life cycle

    def _machine(self, m):
        self._restart(m)
        while True:
            yield from self._up_phase(m)
            self._fail(m)
            with self.station.request() as request:
                yield request
                self._begin_service(m)
                yield from self._serve(m)
            gate = self.barrier
            self._complete(m)
            if self.mode is SimMode.BARRIER:
                yield gate
                self._move(m, _UP)
                self._record()
                self._restart(m)

    def _up_phase(self, m):
        remaining = self.z_drawn[m]
        while True:
            start = self.env.now
            try:
                yield self.env.timeout(remaining)
                return
            except simpy.Interrupt:
                remaining = max(0.0, remaining - (self.env.now - start))
            while self.status[m] == _PARKED:
                yield self.resume
                if self.serving is None:
                    self._move(m, _UP)
                    self._record()

    def _fail(self, m):
        self._count_event()
        self._move(m, _QUEUED)
        if self.serving is not None and self.c > 0:
            self.machines[self.serving].interrupt("backlog")
        self._record()

    def _begin_service(self, m):
        self._move(m, _IN_SERVICE)
        self.serving = m
        if self.mode is SimMode.INTERMITTENT:
            for other in range(self.p):
                if self.status[other] == _UP:
                    self._move(other, _PARKED)
                    self.machines[other].interrupt("suspend")
        self._record()

    def _serve(self, m):
        """Hold the station until the job's work is done at the current stretch."""
        work = self.service[m]()
        while True:
            rate = 1.0 / self._stretch()
            start = self.env.now
            try:
                yield self.env.timeout(work / rate)
                break
            except simpy.Interrupt:
                work = max(0.0, work - (self.env.now - start) * rate)
        self.serving = None

    def _complete(self, m):
        self._count_event()
        self.completions += 1
        now = self.env.now
        self.completion_clock.append(now)
        if self.completions > self.config.warmup:
            self.counted[m] = True

        if self.mode is SimMode.BARRIER:
            self._move(m, _PARKED)
            self._record(finished_tour=True)
            if self.n_parked == self.p:
                self.barrier = self._open(self.barrier)
                self.epochs.append((self.completions, now))
        else:
            self._move(m, _UP)
            self._record(finished_tour=True)
            self._restart(m)
            if self.n_queued == 0:
                if self.mode is SimMode.INTERMITTENT:
                    self.resume = self._open(self.resume)
                self.epochs.append((self.completions, now))

        if self.completions == self.config.cycles:
            self.finished.succeed()

    def run(self) -> SimOutcome:
        try:
            self.env.run(until=self.finished)
        except RuntimeError as e:
            raise SimulationError(f"simulation stalled before the requested tours completed: {e}")
        return self._summarize()

    # estimation

    def _batches(self):
        """
        Tour counts and durations of the batches the estimate is built from.

        Batches are runs of whole regeneration cycles (spans between instants
        at which the station empties with every machine up, or a barrier
        releases) counted from the first such instant at or after warmup.
        Runs with too few cycles fall back to equal tour-count batches.
        """
        config = self.config
        counts = np.array([count for count, _ in self.epochs])
        times = np.array([time for _, time in self.epochs])
        keep = counts >= config.warmup
        counts, times = counts[keep], times[keep]
        n_cycles = len(counts) - 1
        if n_cycles >= config.batches or (self.mode is SimMode.BARRIER and n_cycles >= 2):
            groups = np.array_split(np.arange(n_cycles), min(config.batches, n_cycles))
            first = np.array([group[0] for group in groups])
            last = np.array([group[-1] + 1 for group in groups])
            return counts[last] - counts[first], times[last] - times[first]

        size = (config.cycles - config.warmup) // config.batches
        clock = np.asarray(self.completion_clock)
        edges = clock[config.warmup + size * np.arange(config.batches + 1)]
        return np.full(config.batches, size), np.diff(edges)

    def _summarize(self) -> SimOutcome:
        config = self.config
        tours, spans = self._batches()
        x_hat = float(tours.sum() / spans.sum())

        # ratio estimator: the spread of N_j - x_hat T_j over the mean batch duration
        deviations = tours - x_hat * spans
        quantile = stats.t.ppf(0.5 + config.confidence / 2.0, len(tours) - 1)
        ci = float(quantile * np.std(deviations, ddof=1) / (np.mean(spans) * math.sqrt(len(tours))))

        if self.residences:
            r_hat = float(np.mean(self.residences))
        else:
            # too few released tours to measure directly; fall back to R = p/X - Z
            r_hat = float(self.p / x_hat - config.uptime_dist.mean)

        later_rounds = self.round_flags[1:]
        sync_fraction = float(np.mean(later_rounds)) if later_rounds else None

        reference, reference_residence = analytic_reference(config)
        return SimOutcome(
            x_hat=x_hat,
            r_hat=r_hat,
            ci_halfwidth=ci,
            analytic_reference=reference,
            analytic_residence=reference_residence,
            tours_used=config.cycles - config.warmup,
            tours_measured=int(tours.sum()),
            sync_fraction=sync_fraction,
            events_processed=self.processed,
            mode=config.mode.value,
            p=config.p,
            seed=config.seed,
        )


def analytic_reference(config: SimConfig):
    """
    Analytic (throughput, residence) a run is checked against.

    Exact mean-value solution for the asynchronous regime, the synchronous
    bound for barrier and intermittent runs. Asynchronous runs with state
    dependence have no reference.
    """
    params = QueueParams(config.service_dist.mean, config.uptime_dist.mean, config.state_dependence_c)
    if config.mode is SimMode.ASYNCHRONOUS:
        if config.state_dependence_c > 0:
            return None, None
        solution = exact_repairman(params, config.p)
        return solution.x(config.p), solution.r(config.p)
    return (float(synchronous_state_dependent_throughput(params, config.p)),
            float(state_dependent_residence(params, config.p)))


def run_sim(config: SimConfig, observer: Optional[Observer] = None) -> SimOutcome:
    """
    Simulate one configuration.

    Simultaneous events run in the order they were scheduled; machines start,
    queue and are released in index order. Every machine draws
    from its own substreams of the master seed, so identical configs give
    bit-identical outcomes and adding machines leaves earlier draws intact.
    """
    logger.debug(f"Simulating p={config.p} mode={config.mode.value} seed={config.seed}")
    outcome = _RepairShop(config, observer).run()
    logger.debug(f"p={config.p}: x_hat={outcome.x_hat:.6g} +/- {outcome.ci_halfwidth:.3g}")
    return outcome


def sweep(configs: List[SimConfig], max_workers: int = 1) -> List[SimOutcome]:
    """
    Run configurations that differ only in p, returning outcomes ordered by p.
    """
    if not configs:
        return []
    template = replace(configs[0], p=1)
    for config in configs[1:]:
        if replace(config, p=1) != template:
            raise SimulationError("sweep configurations may differ only in p")
    ordered = sorted(configs, key=lambda config: config.p)
    if max_workers > 1 and len(ordered) > 1:
        with ProcessPoolExecutor(max_workers=max_workers) as pool:
            return list(pool.map(run_sim, ordered))
    return [run_sim(config) for config in ordered]
