"""
Queueing Agent for the scalability toolkit.
Tabulates repairman throughput bounds against the equivalent USL capacity.
"""
from src.agents.base_agent import BaseAgent
from src.tools.queueing import (
    QueueParams,
    exact_repairman,
    implied_model_params,
    synchronous_throughput,
    usl_from_queue,
)
from src.tools.models import usl_capacity


class QueueingAgent(BaseAgent):
    """
    Agent responsible for analytic repairman bounds.
    """

    def __init__(self, config=None):
        super().__init__("Queueing", config)
        self.log("INFO", "QueueingAgent initialized")

    def process(self, message):
        """
        Process queueing requests.

        Supported message types:
        - bound: Per-p table of synchronous bound, exact throughput and
          USL-equivalent capacity for (s, z, c)

        Args:
            message (dict): Request message

        Returns:
            dict: Response with the table or error
        """
        msg_type = message.get("type")

        if msg_type == "bound":
            return self.bound(message.get("s"), message.get("z"), message.get("c", 0.0),
                              message.get("p_values", []))
        else:
            return self.unknown_type(msg_type)

    def bound(self, s, z, c, p_values):
        """
        Build the bound table.

        Args:
            s: Mean service time
            z: Mean up time
            c: State-dependence coefficient
            p_values: Processor counts

        Returns:
            dict: sigma, kappa and one row per p
        """
        try:
            params = QueueParams(float(s), float(z), float(c))
            implied = implied_model_params(params)
            p_values = sorted(set(int(p) for p in p_values))
            if not p_values:
                return {"status": "error", "error_type": "usage_error", "message": "No processor counts given"}
            solution = exact_repairman(params, max(p_values))
            rows = []
            for p in p_values:
                rows.append({
                    "p": p,
                    "synchronous_bound": float(synchronous_throughput(params, p)),
                    "exact_throughput": solution.x(p),
                    "exact_residence": solution.r(p),
                    "usl_capacity": float(usl_from_queue(params, p)),
                    "usl_capacity_from_params": float(usl_capacity(implied, p)),
                })
        except Exception as e:
            return self.error_response(e)

        self.log("INFO", f"Bound table for s={s} z={z} c={c}: sigma={implied.sigma:.6g} kappa={implied.kappa:.6g}")
        return {"status": "success", "params": params, "sigma": implied.sigma, "kappa": implied.kappa, "rows": rows}
