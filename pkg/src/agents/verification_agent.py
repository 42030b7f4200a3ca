"""
Verification Agent for the scalability toolkit.
Runs the identity and oracle suite linking the queueing model to the
scalability laws, and reports the worst relative error of each check.
"""
import itertools
import math

import numpy as np

from src.agents.base_agent import BaseAgent
from src.tools.models import (
    LatencyParams,
    ModelParams,
    amdahl_asymptote,
    amdahl_speedup,
    latency_two_param_minimum,
    simplified_extrema_check,
    speedup_from_latency,
    usl_capacity,
    usl_pstar,
)
from src.tools.queueing import (
    QueueParams,
    amdahl_corollary_check,
    birth_death_repairman,
    duality_check,
    exact_repairman,
    gustafson_corollary_check,
    implied_model_params,
    main_theorem_check,
    markov_serial_fraction,
    round_trip_time,
    serial_fraction,
    synchronous_throughput,
)

DEFAULTS = {
    "tolerance": 1e-12,
    "oracle_tolerance": 1e-10,
    "seed": 42,
    "service_times": [0.1, 1, 5],
    "uptimes": [0, 1, 9, 99],
    "state_dependence": [0, 0.01, 0.1, 1, 10],
    "p_max": 1024,
    "bound_p_max": 256,
    "oracle_p_max": 8,
    "oracle_pairs": [[1, 9], [1, 0], [2, 6]],
    "pstar_draws": 100,
    "pstar_p_limit": 1_000_000,
    "asymptote_sigma": 0.05,
    "asymptote_p": 100_000,
    "asymptote_epsilon": 0.01,
    "extrema_grid_step": 1e-4,
}


def _entry(name, max_rel_error, tolerance, detail, passed=None):
    if passed is None:
        passed = max_rel_error <= tolerance
    return {
        "name": name,
        "max_rel_error": float(max_rel_error),
        "tolerance": float(tolerance),
        "passed": bool(passed),
        "detail": detail,
    }


class VerificationAgent(BaseAgent):
    """
    Agent responsible for the verification suite.

    Identity checks are judged against the requested tolerance; the
    birth-death oracle, the asymptote and the grid scan carry their own.
    """

    def __init__(self, config=None):
        super().__init__("Verification", config)
        self.settings = {**DEFAULTS, **self.config_section("verification")}
        self.log("INFO", "VerificationAgent initialized")

    def process(self, message):
        """
        Process verification requests.

        Supported message types:
        - verify: Run every check; optional ``tolerance`` overrides the default

        Args:
            message (dict): Request message

        Returns:
            dict: Response with the check entries and the overall verdict
        """
        msg_type = message.get("type")

        if msg_type == "verify":
            return self.verify(message.get("tolerance"))
        else:
            return self.unknown_type(msg_type)

    def verify(self, tolerance=None):
        tolerance = float(tolerance if tolerance is not None else self.settings["tolerance"])
        if not tolerance >= 0:
            return {"status": "error", "error_type": "domain_error",
                    "message": f"tolerance must be non-negative, got {tolerance}"}

        checks = [
            self.check_main_theorem,
            self.check_amdahl_corollary,
            self.check_gustafson_corollary,
            self.check_duality,
            self.check_latency_duality,
            self.check_markov_serial_fraction,
            self.check_pstar,
            self.check_amdahl_asymptote,
            self.check_repairman_oracle,
            self.check_round_trip,
            self.check_bound_ordering,
            self.check_simplified_extrema,
        ]
        entries = []
        try:
            for check in checks:
                result = check(tolerance)
                entries.extend(result if isinstance(result, list) else [result])
        except Exception as e:
            return self.error_response(e)

        failed = [entry["name"] for entry in entries if not entry["passed"]]
        for name in failed:
            self.log("WARNING", f"Check {name} failed")
        self.log("INFO", f"{len(entries) - len(failed)}/{len(entries)} checks passed at tolerance {tolerance:g}")
        return {"status": "success", "tolerance": tolerance, "checks": entries, "passed": not failed}

    def _queue_grid(self, with_c=True):
        cs = self.settings["state_dependence"] if with_c else [0.0]
        for s, z, c in itertools.product(self.settings["service_times"], self.settings["uptimes"], cs):
            yield QueueParams(float(s), float(z), float(c))

    def _p_grid(self, upper=None):
        return np.arange(1, int(upper or self.settings["p_max"]) + 1)

    def _worst(self, name, identity_checks, tolerance):
        errors = [check.max_rel_error for check in identity_checks]
        detail = f"{len(errors)} parameter sets, p = 1..{self.settings['p_max']}"
        return _entry(name, max(errors), tolerance, detail)

    def check_main_theorem(self, tolerance):
        p = self._p_grid()
        return self._worst("main_theorem", [main_theorem_check(q, p) for q in self._queue_grid()], tolerance)

    def check_amdahl_corollary(self, tolerance):
        p = self._p_grid()
        return self._worst("amdahl_corollary",
                           [amdahl_corollary_check(q, p) for q in self._queue_grid(with_c=False)], tolerance)

    def check_gustafson_corollary(self, tolerance):
        p = self._p_grid()
        return self._worst("gustafson_corollary",
                           [gustafson_corollary_check(q, p) for q in self._queue_grid(with_c=False)], tolerance)

    def check_duality(self, tolerance):
        p = self._p_grid()
        pairs = [duality_check(q, p) for q in self._queue_grid(with_c=False)]
        return [self._worst("duality_paths", [paths for paths, _ in pairs], tolerance),
                self._worst("duality_amdahl", [amdahl for _, amdahl in pairs], tolerance)]

    def check_latency_duality(self, tolerance):
        """T1/T_p from the two-parameter latency against the capacity curve."""
        p = self._p_grid()
        worst = 0.0
        count = 0
        for queue in self._queue_grid():
            params = implied_model_params(queue)
            lp = LatencyParams(t1=queue.s + queue.z, sigma=params.sigma, kappa=params.kappa)
            lhs = speedup_from_latency(lp, p)
            rhs = usl_capacity(params, p)
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / rhs)))
            count += 1
        return _entry("latency_duality", worst, tolerance,
                      f"{count} parameter sets, p = 1..{self.settings['p_max']}")

    def check_markov_serial_fraction(self, tolerance):
        worst = 0.0
        for queue in self._queue_grid(with_c=False):
            if queue.z == 0:
                continue
            chain = markov_serial_fraction(1.0 / queue.z, 1.0 / queue.s)
            expected = serial_fraction(queue)
            worst = max(worst, abs(chain - expected) / expected)
        return _entry("markov_serial_fraction", worst, tolerance, "two-state chain against S/(S+Z)")

    def check_pstar(self, tolerance):
        """
        Brute-force integer argmax of the capacity over seeded random draws.

        The argmax must be floor(p*) or ceil(p*); the reported error is the
        worst relative capacity shortfall of the resolved p_opt.
        """
        rng = np.random.default_rng(self.settings["seed"])
        limit = int(self.settings["pstar_p_limit"])
        p = self._p_grid(limit)
        misses = []
        latency_mismatches = 0
        worst = 0.0
        for _ in range(int(self.settings["pstar_draws"])):
            sigma = float(rng.uniform(0.0, 0.99))
            kappa = float(10.0 ** rng.uniform(-6.0, -1.0))
            params = ModelParams(sigma, kappa)
            optimum = usl_pstar(params)
            curve = usl_capacity(params, p)
            brute = int(np.argmax(curve)) + 1
            allowed = {max(1, math.floor(optimum.location)), max(1, math.ceil(optimum.location))}
            if brute not in allowed:
                misses.append((sigma, kappa, brute))
            best = float(curve[brute - 1])
            worst = max(worst, (best - optimum.value) / best)
            if latency_two_param_minimum(LatencyParams(1.0, sigma, kappa)).p_opt != optimum.p_opt:
                latency_mismatches += 1

        spot = usl_pstar(ModelParams(0.0, 0.01))
        spot_ok = spot.location == 10.0 and spot.p_opt == 10
        passed = not misses and spot_ok and latency_mismatches == 0 and worst <= tolerance
        detail = (f"{self.settings['pstar_draws']} draws over p = 1..{limit}: {len(misses)} argmax misses, "
                  f"{latency_mismatches} latency minimum mismatches; sigma=0 kappa=0.01 gives p*={spot.location:g}")
        return _entry("pstar_argmax", worst, tolerance, detail, passed=passed)

    def check_amdahl_asymptote(self, tolerance):
        sigma = float(self.settings["asymptote_sigma"])
        epsilon = float(self.settings["asymptote_epsilon"])
        p = self._p_grid(int(self.settings["asymptote_p"]))
        ceiling = amdahl_asymptote(sigma)
        speedup = amdahl_speedup(sigma, p)
        gap = (ceiling - float(speedup[-1])) / ceiling
        passed = bool(np.all(speedup < ceiling)) and gap <= epsilon
        detail = f"sigma={sigma:g}: S_p={float(speedup[-1]):.6g} at p={len(p)}, limit {ceiling:g}"
        return _entry("amdahl_asymptote", gap, epsilon, detail, passed=passed)

    def check_repairman_oracle(self, tolerance):
        """Mean-value recursion against the birth-death chain solved directly."""
        oracle_tolerance = float(self.settings["oracle_tolerance"])
        worst = 0.0
        for s, z in self.settings["oracle_pairs"]:
            queue = QueueParams(float(s), float(z))
            solution = exact_repairman(queue, int(self.settings["oracle_p_max"]))
            for n in range(1, solution.p + 1):
                oracle = birth_death_repairman(queue, n)
                worst = max(worst, abs(solution.x(n) - oracle) / oracle)
        detail = f"(s, z) in {self.settings['oracle_pairs']}, p = 1..{self.settings['oracle_p_max']}"
        return _entry("repairman_oracle", worst, oracle_tolerance, detail)

    def check_round_trip(self, tolerance):
        """R(n) + Z against n / X(n) along the mean-value recursion."""
        p_max = int(self.settings["bound_p_max"])
        n = self._p_grid(p_max)
        worst = 0.0
        for queue in self._queue_grid(with_c=False):
            solution = exact_repairman(queue, p_max)
            lhs = round_trip_time(solution.residence, queue.z)
            rhs = n / solution.throughput
            worst = max(worst, float(np.max(np.abs(lhs - rhs) / rhs)))
        return _entry("round_trip_closure", worst, tolerance, f"p = 1..{p_max}")

    def check_bound_ordering(self, tolerance):
        """Synchronous bound <= exact throughput <= min(p/(S+Z), 1/S)."""
        p_max = int(self.settings["bound_p_max"])
        n = self._p_grid(p_max)
        worst = 0.0
        for queue in self._queue_grid(with_c=False):
            exact = exact_repairman(queue, p_max).throughput
            lower = synchronous_throughput(queue, n)
            upper = np.minimum(n / (queue.s + queue.z), 1.0 / queue.s)
            worst = max(worst, float(np.max((lower - exact) / exact)), float(np.max((exact - upper) / upper)), 0.0)
        return _entry("bound_ordering", worst, tolerance, f"violations relative to exact, p = 1..{p_max}")

    def check_simplified_extrema(self, tolerance):
        """Stationary points of p/(1+p+p^2) and a grid scan for the maximum."""
        step = float(self.settings["extrema_grid_step"])
        extrema = simplified_extrema_check(grid_step=step)
        # f(-1) = -1 / (1 - 1 + 1) = -1; only the maximum carries the value 1/3
        expected = [(extrema.maximum, (1.0, 1.0 / 3.0)), (extrema.minimum, (-1.0, -1.0))]
        worst = 0.0
        for found, target in expected:
            for value, reference in zip(found, target):
                worst = max(worst, abs(value - reference) / abs(reference))
        grid_error = abs(extrema.grid_argmax - 1.0)
        detail = (f"maximum {extrema.maximum}, minimum {extrema.minimum}; "
                  f"grid argmax {extrema.grid_argmax:g} at step {step:g}")
        return [_entry("simplified_extrema", worst, tolerance, detail),
                _entry("simplified_extrema_grid", grid_error, step, detail)]
