"""
Unit tests for the OrchestratorAgent class.
"""
import json
from dataclasses import replace

import pytest
from unittest.mock import patch
from src.agents.orchestrator_agent import OrchestratorAgent
from src.utils.report import ReportDocument

@pytest.fixture
def fast_config(toolkit_config):
    """Bundled configuration with short simulations and a small verification grid."""
    simulation = {**toolkit_config.simulation, "cycles": 3000, "warmup": 300}
    verification = {**toolkit_config.verification, "p_max": 64, "bound_p_max": 32,
                    "pstar_draws": 10, "pstar_p_limit": 100000}
    return replace(toolkit_config, simulation=simulation, verification=verification)

@pytest.fixture
def orchestrator(fast_config):
    return OrchestratorAgent(config=fast_config)

class TestOrchestratorAgent:
    """Tests for the OrchestratorAgent class."""

    def test_initialization(self, orchestrator):
        assert orchestrator.name == "Orchestrator"
        assert orchestrator.data_agent.cache_enabled is True
        assert orchestrator.simulation_agent.defaults["cycles"] == 3000
        assert orchestrator.verification_agent.settings["p_max"] == 64

    @patch('src.agents.orchestrator_agent.load_config')
    def test_loads_default_config(self, mock_load_config, fast_config):
        mock_load_config.return_value = fast_config
        agent = OrchestratorAgent()
        mock_load_config.assert_called_once()
        assert agent.config is fast_config

    def test_fit(self, orchestrator, usl_csv):
        response = orchestrator.process({"type": "fit", "path": str(usl_csv), "model": "auto"})

        assert response["status"] == "success"
        assert response["passed"] is True
        report = response["report"]
        assert report.command == "fit"
        assert report.result["model"] == "usl"
        assert report.result["sigma"] == pytest.approx(0.02, rel=1e-6)
        assert report.result["kappa"] == pytest.approx(0.0001, rel=1e-6)
        assert report.curve_columns == ["p", "C_p_measured", "C_p_fitted", "X_fitted"]
        assert len(report.curve) == 7
        assert report.inputs["samples"][0] == [1, 100.0]

    def test_fit_report_is_json(self, orchestrator, usl_csv):
        report = orchestrator.process({"type": "fit", "path": str(usl_csv)})["report"]
        text = report.to_json()
        assert json.loads(text)["result"]["model_choice"] == report.result["model_choice"]
        assert ReportDocument.from_json(text).to_json() == text

    def test_fit_missing_file(self, orchestrator, tmp_path):
        response = orchestrator.process({"type": "fit", "path": str(tmp_path / "none.csv")})
        assert response["status"] == "error"
        assert response["error_type"] == "file_not_found"

    def test_predict(self, orchestrator):
        response = orchestrator.process({"type": "predict", "sigma": 0.1, "kappa": 0.0, "x1": 100.0,
                                         "p_values": [1, 11]})

        report = response["report"]
        assert report.curve_columns == ["p", "C_p", "X"]
        assert report.result["rows"][1]["C_p"] == pytest.approx(5.5)
        assert report.result["rows"][1]["X"] == pytest.approx(550.0)
        assert report.result["p_star"] is None

    def test_predict_pstar(self, orchestrator):
        response = orchestrator.process({"type": "predict", "sigma": 0.0, "kappa": 0.01, "p_values": [1, 10]})
        assert response["report"].result["p_star"]["p_opt"] == 10
        assert response["report"].inputs["x1"] == 1.0

    def test_predict_with_think_time(self, orchestrator):
        response = orchestrator.process({"type": "predict", "sigma": 0.1, "x1": 0.1,
                                         "p_values": [1], "think_time": 9.0})
        report = response["report"]
        assert report.curve_columns == ["p", "C_p", "X", "R"]
        assert report.curve[0][3] == pytest.approx(1.0)

    def test_predict_requires_sigma(self, orchestrator):
        response = orchestrator.process({"type": "predict", "p_values": [1]})
        assert response["error_type"] == "usage_error"

    def test_predict_from_fit_report(self, orchestrator, usl_csv, tmp_path):
        fitted = orchestrator.process({"type": "fit", "path": str(usl_csv)})["report"]
        path = tmp_path / "fit.json"
        fitted.save(str(path))

        response = orchestrator.process({"type": "predict", "from_report": str(path), "p_values": [1, 2]})

        report = response["report"]
        assert report.inputs["sigma"] == pytest.approx(fitted.result["sigma"])
        assert report.inputs["x1"] == pytest.approx(100.0)
        assert report.result["rows"][0]["X"] == pytest.approx(100.0)

    def test_predict_from_wrong_report(self, orchestrator, tmp_path):
        path = tmp_path / "verify.json"
        ReportDocument(command="verify", inputs={}, result={}).save(str(path))
        response = orchestrator.process({"type": "predict", "from_report": str(path), "p_values": [1]})
        assert response["error_type"] == "usage_error"

    def test_predict_from_unreadable_report(self, orchestrator, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        response = orchestrator.process({"type": "predict", "from_report": str(path), "p_values": [1]})
        assert response["error_type"] == "parse_error"

    def test_predict_from_missing_report(self, orchestrator, tmp_path):
        response = orchestrator.process({"type": "predict", "from_report": str(tmp_path / "gone.json"),
                                         "p_values": [1]})
        assert response["error_type"] == "file_not_found"

    def test_bound(self, orchestrator):
        response = orchestrator.process({"type": "bound", "s": 1.0, "z": 9.0, "c": 0.1,
                                         "p_values": list(range(1, 11))})

        report = response["report"]
        assert report.result["kappa"] == pytest.approx(0.01)
        assert report.curve[-1][0] == 10
        assert report.curve[-1][1] == pytest.approx(10 / 19)

    def test_simulate_single(self, orchestrator):
        response = orchestrator.process({"type": "simulate", "p_values": [10], "mode": "barrier",
                                         "service": "det:1", "uptime": "det:9"})

        assert response["passed"] is True
        report = response["report"]
        assert report.status == "success"
        assert report.seed == 42
        assert report.result["x_hat"] == pytest.approx(10 / 19, rel=1e-9)
        assert report.inputs["tolerance"] == 0.02

    def test_simulate_sweep(self, orchestrator):
        response = orchestrator.process({"type": "simulate", "p_values": [1, 2, 4], "mode": "barrier",
                                         "service": "det:1", "uptime": "det:9"})

        report = response["report"]
        assert report.inputs["p"] == [1, 2, 4]
        assert len(report.result["runs"]) == 3
        assert [row[0] for row in report.curve] == [1, 2, 4]
        assert response["passed"] is True

    def test_simulate_fail_verdict(self, orchestrator):
        response = orchestrator.process({"type": "simulate", "p_values": [4], "mode": "barrier",
                                         "uptime": "det:9", "tolerance": 0.0})
        assert response["status"] == "success"
        assert response["passed"] is False
        assert response["report"].status == "fail"

    def test_simulate_without_reference_warns(self, orchestrator):
        response = orchestrator.process({"type": "simulate", "p_values": [2], "c": 0.5})
        assert response["passed"] is True
        assert response["report"].warnings

    def test_verify(self, orchestrator):
        response = orchestrator.process({"type": "verify"})

        assert response["passed"] is True
        report = response["report"]
        assert report.status == "success"
        assert report.seed == 42
        assert report.curve_columns == []

    def test_verify_fail(self, orchestrator):
        response = orchestrator.process({"type": "verify", "tolerance": 1e-16})
        assert response["passed"] is False
        assert response["report"].status == "fail"

    def test_non_dict_request(self, orchestrator):
        response = orchestrator.process(["fit"])
        assert response["error_type"] == "usage_error"

    def test_unknown_type(self, orchestrator):
        response = orchestrator.process({"type": "plot"})
        assert response["status"] == "error"
        assert "unknown message type" in response["message"].lower()
