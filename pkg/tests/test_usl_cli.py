"""
Tests for the usl command-line interface.
"""
import json

import pandas as pd
import pytest
import yaml

from src.usl_cli import main, parse_p_range
from src.utils.report import ReportDocument


@pytest.fixture
def fast_config_file(tmp_path, toolkit_config):
    """Config file with short simulations and a small verification grid."""
    data = {
        "settings": toolkit_config.settings,
        "fitting": toolkit_config.fitting,
        "simulation": {**toolkit_config.simulation, "cycles": 3000, "warmup": 300},
        "verification": {**toolkit_config.verification, "p_max": 64, "bound_p_max": 32,
                         "pstar_draws": 10, "pstar_p_limit": 100000},
    }
    path = tmp_path / "fast.yaml"
    path.write_text(yaml.safe_dump(data))
    return str(path)


@pytest.fixture
def run(fast_config_file, capsys):
    """Run the CLI with the fast config; returns (exit code, stdout, stderr)."""
    def _run(*argv):
        code = main([*argv, "--config", fast_config_file])
        captured = capsys.readouterr()
        return code, captured.out, captured.err
    return _run


class TestParsePRange:
    def test_inclusive_range(self):
        assert parse_p_range("1:4") == [1, 2, 3, 4]

    def test_stepped_range(self):
        assert parse_p_range("2:10:4") == [2, 6, 10]

    def test_comma_list(self):
        assert parse_p_range("1,2,8") == [1, 2, 8]

    @pytest.mark.parametrize("text", ["0:4", "4:1", "a:b", "1:2:3:4", "", "1:5:0"])
    def test_invalid(self, text):
        with pytest.raises(Exception):
            parse_p_range(text)


class TestFitCommand:
    def test_text_output(self, run, usl_csv):
        code, out, _ = run("fit", str(usl_csv))

        assert code == 0
        assert "usl" in out
        assert "sigma" in out
        assert "AICc" in out

    def test_json_output(self, run, usl_csv):
        code, out, _ = run("fit", str(usl_csv), "--json")

        assert code == 0
        report = ReportDocument.from_json(out)
        assert report.command == "fit"
        assert report.result["sigma"] == pytest.approx(0.02, rel=1e-6)
        assert report.result["kappa"] == pytest.approx(0.0001, rel=1e-6)
        assert report.to_dict() == json.loads(out)

    def test_two_points_cannot_fit_usl(self, run, tmp_path):
        path = tmp_path / "two.csv"
        path.write_text("p,throughput\n1,10\n2,19\n")

        code, _, err = run("fit", str(path), "--model", "usl")

        assert code == 2
        assert "insufficient_data" in err

    def test_missing_file(self, run, tmp_path):
        code, _, err = run("fit", str(tmp_path / "missing.csv"))
        assert code == 1
        assert "file_not_found" in err

    def test_parse_error_names_line(self, run, tmp_path):
        path = tmp_path / "broken.csv"
        path.write_text("p,throughput\n1,100\n2,lots\n")

        code, _, err = run("fit", str(path))

        assert code == 1
        assert "line 3" in err

    def test_linear_data_has_no_pstar(self, run, tmp_path):
        path = tmp_path / "linear.csv"
        path.write_text("p,throughput\n" + "".join(f"{p},{10 * p}\n" for p in range(1, 9)))

        code, out, _ = run("fit", str(path))

        assert code == 0
        pstar_line = next(line for line in out.splitlines() if line.startswith("p*"))
        assert "none" in pstar_line


class TestPredictCommand:
    def test_amdahl_rows(self, run):
        code, out, _ = run("predict", "--sigma", "0.1", "--kappa", "0", "--x1", "100",
                           "--p-range", "1,11", "--json")

        assert code == 0
        rows = json.loads(out)["result"]["rows"]
        assert rows[1]["p"] == 11
        assert rows[1]["C_p"] == pytest.approx(5.5)
        assert rows[1]["X"] == pytest.approx(550.0)

    def test_text_without_pstar(self, run):
        code, out, _ = run("predict", "--sigma", "0.1", "--p-range", "1:4")
        assert code == 0
        assert "p*: none" in out

    def test_pstar(self, run):
        code, out, _ = run("predict", "--sigma", "0", "--kappa", "0.01", "--p-range", "1:20")
        assert code == 0
        assert "p*: 10 (integer 10)" in out

    def test_invalid_sigma(self, run):
        code, _, err = run("predict", "--sigma", "1.5")
        assert code == 2
        assert "domain_error" in err

    def test_missing_sigma(self, run):
        code, _, _ = run("predict", "--kappa", "0.01")
        assert code == 1

    def test_from_fit_report(self, run, usl_csv, tmp_path):
        saved = tmp_path / "fit.json"
        code, _, _ = run("fit", str(usl_csv), "--json", "--output-file", str(saved))
        assert code == 0

        code, out, _ = run("predict", "--from-report", str(saved), "--p-range", "1", "--json")

        assert code == 0
        assert json.loads(out)["result"]["rows"][0]["X"] == pytest.approx(100.0)


class TestBoundCommand:
    def test_synchronous_bound(self, run):
        code, out, _ = run("bound", "--s", "1", "--z", "9", "--p-range", "10", "--json")

        assert code == 0
        row = json.loads(out)["result"]["rows"][0]
        assert row["synchronous_bound"] == pytest.approx(10 / 19)

    def test_state_dependence_kappa(self, run):
        code, out, _ = run("bound", "--s", "1", "--z", "9", "--c", "0.1", "--p-range", "1:4", "--json")
        assert code == 0
        assert json.loads(out)["result"]["kappa"] == pytest.approx(0.01)

    def test_negative_think_time(self, run):
        code, _, _ = run("bound", "--s", "1", "--z", "-1")
        assert code == 2


class TestSimulateCommand:
    def test_deterministic_barrier_passes(self, run):
        code, out, _ = run("simulate", "--mode", "barrier", "--p", "10",
                           "--service", "det:1", "--uptime", "det:9")

        assert code == 0
        assert "PASS" in out
        assert "seed: 42" in out

    def test_fail_verdict_exits_two(self, run):
        code, out, _ = run("simulate", "--mode", "barrier", "--p", "4", "--uptime", "det:9",
                           "--tolerance", "0")
        assert code == 2
        assert "FAIL" in out

    def test_unknown_mode(self, run):
        code, _, _ = run("simulate", "--mode", "lockstep")
        assert code == 1

    def test_bad_distribution(self, run):
        code, _, _ = run("simulate", "--service", "uniform:1")
        assert code == 1

    def test_sweep_curve_out(self, run, tmp_path):
        curve = tmp_path / "curve.csv"
        code, _, _ = run("simulate", "--mode", "barrier", "--p", "1:3", "--service", "det:1",
                         "--uptime", "det:9", "--curve-out", str(curve))

        assert code == 0
        frame = pd.read_csv(curve)
        assert list(frame.columns) == ["p", "x_hat", "ci_halfwidth", "analytic_reference"]
        assert list(frame["p"]) == [1, 2, 3]


class TestVerifyCommand:
    def test_passes(self, run):
        code, out, _ = run("verify")
        assert code == 0
        assert "0 failed" in out

    def test_tolerance_below_double_precision_fails(self, run):
        code, out, _ = run("verify", "--tolerance", "1e-16")
        assert code == 2
        assert "FAIL" in out

    def test_no_curve_data(self, run, tmp_path):
        code, _, err = run("verify", "--curve-out", str(tmp_path / "curve.csv"))
        assert code == 1
        assert "no curve data" in err


class TestMain:
    def test_no_command(self, capsys):
        assert main([]) == 1

    def test_version(self, capsys):
        assert main(["--version"]) == 0
        assert "0.1.0" in capsys.readouterr().out

    def test_output_file(self, run, tmp_path):
        target = tmp_path / "report.txt"
        code, out, _ = run("bound", "--s", "1", "--z", "9", "--p-range", "1:3", "--output-file", str(target))

        assert code == 0
        assert out == ""
        assert "synchronous_bound" in target.read_text()

    def test_json_output_file_is_the_saved_report(self, run, tmp_path, toolkit_config):
        target = tmp_path / "report.json"
        code, out, _ = run("bound", "--s", "1", "--z", "9", "--p-range", "1:3", "--json",
                           "--output-file", str(target))

        assert code == 0
        assert out == ""
        saved = ReportDocument.load(str(target))
        assert saved.command == "bound"
        assert target.read_text() == saved.to_json(toolkit_config.settings.get("json_indent", 2))

    def test_missing_config(self, capsys, tmp_path):
        assert main(["verify", "--config", str(tmp_path / "nope.yaml")]) == 1

    def test_config_from_environment(self, capsys, monkeypatch, tmp_path):
        monkeypatch.setenv("USL_TOOLKIT_CONFIG", str(tmp_path / "nope.yaml"))
        assert main(["bound", "--s", "1", "--z", "9"]) == 1
