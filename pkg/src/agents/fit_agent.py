"""
Fit Agent for the scalability toolkit.
Estimates scalability parameters and predicts throughput from them.
"""
from src.agents.base_agent import BaseAgent
from src.tools.fitting import FitSettings, fit_model, normalize, predict, predict_residence
from src.tools.models import ModelParams


class FitAgent(BaseAgent):
    """
    Agent responsible for regression and prediction.
    """

    def __init__(self, config=None):
        """
        Initialize the FitAgent.

        Args:
            config: Configuration object
        """
        super().__init__("Fit", config)
        self.settings = FitSettings.from_dict(self.config_section("fitting"))
        self.log("INFO", f"FitAgent initialized ({self.settings.sigma_grid}x{self.settings.kappa_grid} start grid)")

    def process(self, message):
        """
        Process fitting requests.

        Supported message types:
        - fit: Normalize samples and fit the requested model ("auto" selects)
        - predict: Predict throughput (and optionally residence) over p values

        Args:
            message (dict): Request message

        Returns:
            dict: Response with fit or prediction, or error
        """
        msg_type = message.get("type")

        if msg_type == "fit":
            return self.fit(message.get("samples", []), message.get("baseline"), message.get("model", "auto"))
        elif msg_type == "predict":
            return self.predict(message.get("params"), message.get("x1"),
                                message.get("p_values", []), message.get("think_time"))
        else:
            return self.unknown_type(msg_type)

    def fit(self, samples, baseline=None, model="auto"):
        """
        Fit a model to throughput samples.

        Args:
            samples: List of ThroughputSample
            baseline: Optional explicit X(1)
            model: auto, ideal, amdahl or usl

        Returns:
            dict: Fit result with the normalized points
        """
        try:
            points, x1 = normalize(samples, baseline)
            self.log("INFO", f"Fitting {model} model to {len(points)} points (x1={x1:g})")
            result = fit_model(points, model, x1, self.settings)
        except Exception as e:
            return self.error_response(e)

        for warning in result.warnings:
            self.log("WARNING", warning)
        self.log("INFO", f"Fitted sigma={result.params.sigma:.6g} kappa={result.params.kappa:.6g} "
                         f"choice={result.model_choice}")
        return {"status": "success", "fit": result, "points": points, "baseline": x1}

    def predict(self, params, x1, p_values, think_time=None):
        """
        Predict throughput from parameters.

        Args:
            params: ModelParams or a dict with sigma and kappa
            x1: Baseline throughput
            p_values: Processor counts
            think_time: Optional Z for a residence-time column

        Returns:
            dict: Prediction and optional residence rows
        """
        try:
            if isinstance(params, dict):
                params = ModelParams(float(params["sigma"]), float(params.get("kappa", 0.0)))
            prediction = predict(params, float(x1), p_values)
            residence = None
            if think_time is not None:
                residence = predict_residence(params, float(x1), float(think_time), p_values)
        except Exception as e:
            return self.error_response(e)

        for warning in prediction.warnings:
            self.log("WARNING", warning)
        return {"status": "success", "params": params, "prediction": prediction, "residence": residence}
