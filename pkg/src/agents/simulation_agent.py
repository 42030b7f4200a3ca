"""
Simulation Agent for the scalability toolkit.
Runs repairman simulations and judges them against their analytic reference.
"""
from dataclasses import replace

from src.agents.base_agent import BaseAgent
from src.tools.simulator import Distribution, SimConfig, run_sim, sweep


class SimulationAgent(BaseAgent):
    """
    Agent responsible for discrete-event simulation runs.
    """

    def __init__(self, config=None):
        """
        Initialize the SimulationAgent.

        Args:
            config: Configuration object
        """
        super().__init__("Simulation", config)
        self.defaults = self.config_section("simulation")
        self.max_workers = int(self.defaults.get("max_workers", 1))
        self.log("INFO", f"SimulationAgent initialized (max_workers={self.max_workers})")

    def process(self, message):
        """
        Process simulation requests.

        Supported message types:
        - simulate: One run, judged against the tolerance
        - sweep: The same run for several p values

        Message fields mirror SimConfig; ``service`` and ``uptime`` may be
        Distribution objects or ``kind:mean[:cv]`` strings. Fields left out
        fall back to the simulation section of the configuration.

        Args:
            message (dict): Request message

        Returns:
            dict: Response with outcome(s) and verdicts, or error
        """
        msg_type = message.get("type")

        if msg_type == "simulate":
            return self.simulate(message)
        elif msg_type == "sweep":
            return self.sweep(message)
        else:
            return self.unknown_type(msg_type)

    def build_config(self, message):
        """
        Assemble a SimConfig from a request message.

        Raises:
            SimulationError: for invalid fields
        """
        service = message.get("service", "exp:1")
        uptime = message.get("uptime", "exp:9")
        if isinstance(service, str):
            service = Distribution.parse(service)
        if isinstance(uptime, str):
            uptime = Distribution.parse(uptime)

        def pick(key, default):
            value = message.get(key)
            return value if value is not None else self.defaults.get(key, default)

        return SimConfig(
            p=int(message.get("p", 1)),
            service_dist=service,
            uptime_dist=uptime,
            mode=message.get("mode", "asynchronous"),
            state_dependence_c=float(message.get("c") or 0.0),
            cycles=int(pick("cycles", 100_000)),
            warmup=int(pick("warmup", 1_000)),
            seed=int(pick("seed", 42)),
            batches=int(pick("batches", 30)),
            confidence=float(pick("confidence", 0.95)),
            max_events=message.get("max_events"),
        )

    def tolerance(self, message):
        value = message.get("tolerance")
        return float(value if value is not None else self.defaults.get("tolerance", 0.02))

    @staticmethod
    def verdict(outcome, tolerance):
        """PASS/FAIL against the analytic reference, None when there is none."""
        if outcome.relative_error is None:
            return None
        return outcome.relative_error <= tolerance

    def simulate(self, message):
        try:
            config = self.build_config(message)
            tolerance = self.tolerance(message)
            self.log("INFO", f"Simulating p={config.p} mode={config.mode.value} "
                             f"cycles={config.cycles} seed={config.seed}")
            outcome = run_sim(config)
        except Exception as e:
            return self.error_response(e)

        passed = self.verdict(outcome, tolerance)
        if passed is False:
            self.log("WARNING", f"x_hat={outcome.x_hat:.6g} differs from reference "
                                f"{outcome.analytic_reference:.6g} by {outcome.relative_error:.3%}")
        return {"status": "success", "config": config, "outcome": outcome,
                "tolerance": tolerance, "passed": passed}

    def sweep(self, message):
        try:
            base = self.build_config(message)
            tolerance = self.tolerance(message)
            p_values = sorted(set(int(p) for p in message.get("p_values", [base.p])))
            configs = [replace(base, p=p) for p in p_values]
            self.log("INFO", f"Sweeping p={p_values} mode={base.mode.value}")
            outcomes = sweep(configs, max_workers=int(message.get("max_workers") or self.max_workers))
        except Exception as e:
            return self.error_response(e)

        verdicts = [self.verdict(outcome, tolerance) for outcome in outcomes]
        return {"status": "success", "config": base, "outcomes": outcomes,
                "tolerance": tolerance, "passed": verdicts}
