#!/usr/bin/env python
"""
Scalability Toolkit CLI

Fits the universal scalability law to benchmark data, predicts capacity,
tabulates machine-repairman bounds, runs repairman simulations and executes
the identity verification suite.

Exit codes: 0 success, 1 usage or parse error, 2 domain, fit or simulation
failure (including a FAIL verdict).
"""

import argparse
import logging
import sys
from typing import Any, Dict, List, Optional

import yaml
from colorama import Fore, Style
from dotenv import load_dotenv
from tabulate import tabulate

from src import __version__
from src.agents.orchestrator_agent import OrchestratorAgent
from src.tools.errors import SimulationError
from src.tools.simulator import Distribution, SimMode
from src.utils.config import load_config

logger = logging.getLogger('usl_cli')

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_FAILURE = 2

USAGE_ERRORS = {"usage_error", "parse_error", "data_file_error", "file_not_found", "config_error"}

LOG_LEVELS = ["DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL"]


class ToolkitArgumentParser(argparse.ArgumentParser):
    """ArgumentParser whose usage errors exit with status 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def parse_p_range(text: str) -> List[int]:
    """
    Parse a processor-count range: ``a:b`` (inclusive), ``a:b:step``,
    a comma list ``1,2,4`` or a single value.
    """
    try:
        if ":" in text:
            parts = [int(part) for part in text.split(":")]
            if len(parts) not in (2, 3):
                raise ValueError
            start, stop = parts[0], parts[1]
            step = parts[2] if len(parts) == 3 else 1
            if step < 1 or stop < start:
                raise ValueError
            values = list(range(start, stop + 1, step))
        else:
            values = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid p range '{text}' (expected a:b, a:b:step or a comma list)")
    if not values or min(values) < 1:
        raise argparse.ArgumentTypeError(f"p range '{text}' must contain integers >= 1")
    return values


def distribution(text: str) -> Distribution:
    try:
        return Distribution.parse(text)
    except SimulationError as e:
        raise argparse.ArgumentTypeError(str(e))


def setup_argparse() -> argparse.ArgumentParser:
    """Set up command-line arguments parser."""
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="Emit the report as JSON")
    common.add_argument("--output-file", help="Write the report to this path instead of stdout")
    common.add_argument("--curve-out", help="Write plot-ready curve data as CSV to this path")
    common.add_argument("--log-level", choices=LOG_LEVELS, help="Logging level (default from config)")
    common.add_argument("--config", help="Configuration file (default $USL_TOOLKIT_CONFIG or bundled)")

    parser = ToolkitArgumentParser(
        description="Universal scalability law toolkit"
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")

    subparsers = parser.add_subparsers(dest="command", help="Command to run")

    # Fit command
    fit_parser = subparsers.add_parser("fit", parents=[common], help="Fit a scalability model to benchmark data")
    fit_parser.add_argument("input", help="CSV file of p,throughput rows")
    fit_parser.add_argument(
        "--model",
        choices=["auto", "amdahl", "usl", "ideal"],
        default="auto",
        help="Model to fit; auto selects by AICc"
    )
    fit_parser.add_argument("--baseline", type=float, help="Explicit X(1) instead of the p=1 sample")

    # Predict command
    predict_parser = subparsers.add_parser("predict", parents=[common], help="Predict throughput from parameters")
    predict_parser.add_argument("--sigma", type=float, help="Contention coefficient")
    predict_parser.add_argument("--kappa", type=float, help="Coherency coefficient")
    predict_parser.add_argument("--x1", type=float, help="Baseline throughput X(1) (default 1)")
    predict_parser.add_argument("--from-report", help="Take sigma, kappa and X(1) from a fit report (JSON)")
    predict_parser.add_argument("--p-range", type=parse_p_range, default=parse_p_range("1:32"),
                                help="Processor counts, e.g. 1:64 or 1,2,4,8")
    predict_parser.add_argument("--think-time", type=float, help="Think time Z; adds a predicted residence column")

    # Bound command
    bound_parser = subparsers.add_parser("bound", parents=[common], help="Tabulate machine-repairman bounds")
    bound_parser.add_argument("--s", type=float, required=True, help="Mean service time")
    bound_parser.add_argument("--z", type=float, required=True, help="Mean up (think) time")
    bound_parser.add_argument("--c", type=float, default=0.0, help="State-dependence coefficient")
    bound_parser.add_argument("--p-range", type=parse_p_range, default=parse_p_range("1:32"),
                              help="Processor counts, e.g. 1:64 or 1,2,4,8")

    # Simulate command
    simulate_parser = subparsers.add_parser("simulate", parents=[common], help="Simulate the repairman system")
    simulate_parser.add_argument("--mode", choices=[mode.value for mode in SimMode], default="asynchronous",
                                 help="Synchronization regime")
    simulate_parser.add_argument("--p", type=parse_p_range, default=[1],
                                 help="Machine count, or a range to sweep")
    simulate_parser.add_argument("--service", type=distribution, default=distribution("exp:1"),
                                 help="Service distribution kind:mean[:cv] (det, exp, lognormal)")
    simulate_parser.add_argument("--uptime", type=distribution, default=distribution("exp:9"),
                                 help="Up-time distribution kind:mean[:cv]")
    simulate_parser.add_argument("--c", type=float, default=0.0, help="State-dependence coefficient")
    simulate_parser.add_argument("--cycles", type=int, help="Tours to simulate")
    simulate_parser.add_argument("--warmup", type=int, help="Tours discarded before measuring")
    simulate_parser.add_argument("--seed", type=int, help="Master seed")
    simulate_parser.add_argument("--batches", type=int, help="Batches for the confidence interval")
    simulate_parser.add_argument("--tolerance", type=float, help="Relative tolerance for PASS")
    simulate_parser.add_argument("--max-workers", type=int, help="Processes used by a sweep")

    # Verify command
    verify_parser = subparsers.add_parser("verify", parents=[common], help="Run the identity verification suite")
    verify_parser.add_argument("--tolerance", type=float, help="Relative tolerance (default 1e-12)")

    return parser


def build_message(args) -> Dict[str, Any]:
    """Translate parsed arguments into an orchestrator request."""
    if args.command == "fit":
        return {"type": "fit", "path": args.input, "model": args.model, "baseline": args.baseline}
    if args.command == "predict":
        return {"type": "predict", "sigma": args.sigma, "kappa": args.kappa, "x1": args.x1,
                "from_report": args.from_report, "p_values": args.p_range, "think_time": args.think_time}
    if args.command == "bound":
        return {"type": "bound", "s": args.s, "z": args.z, "c": args.c, "p_values": args.p_range}
    if args.command == "simulate":
        return {"type": "simulate", "p_values": args.p, "mode": args.mode, "service": args.service,
                "uptime": args.uptime, "c": args.c, "cycles": args.cycles, "warmup": args.warmup,
                "seed": args.seed, "batches": args.batches, "tolerance": args.tolerance,
                "max_workers": args.max_workers}
    return {"type": "verify", "tolerance": args.tolerance}


def configure_logging(config, level: Optional[str]) -> None:
    settings = config.logging_settings
    logging.basicConfig(
        level=level or settings.get("default_level", "WARNING"),
        format=settings.get("format", '%(asctime)s - %(name)s - %(levelname)s - %(message)s'),
        stream=sys.stderr,
        force=True,
    )


def verdict(passed, color: bool) -> str:
    """PASS/FAIL label, colored for terminals."""
    if passed is None:
        return "N/A"
    label = "PASS" if passed else "FAIL"
    if not color:
        return label
    return f"{Fore.GREEN if passed else Fore.RED}{label}{Style.RESET_ALL}"


def _num(value, float_format: str) -> str:
    if value is None:
        return "none"
    if isinstance(value, float):
        return format(value, float_format)
    return str(value)


def format_fit(result: Dict[str, Any], float_format: str) -> str:
    p_star = result["p_star"]
    p_star_text = "none" if p_star is None else f"{p_star['location']:{float_format}} (integer {p_star['p_opt']})"
    summary = [
        ["model", f"{result['model']} (auto choice: {result['model_choice']})"],
        ["sigma", _num(result["sigma"], float_format)],
        ["kappa", _num(result["kappa"], float_format)],
        ["p*", p_star_text],
        ["r^2", _num(result["r_squared"], float_format)],
        ["X(1)", _num(result["x1_used"], float_format)],
        ["points", result["n_points"]],
        ["converged", result["converged"]],
    ]
    scores = [[name, _num(score["sigma"], float_format), _num(score["kappa"], float_format),
               _num(score["rss"], float_format), _num(score["aicc"], float_format)]
              for name, score in result["scores"].items()]
    return "\n\n".join([
        tabulate(summary, tablefmt="plain"),
        tabulate(scores, headers=["model", "sigma", "kappa", "rss", "AICc"], tablefmt="simple"),
    ])


def format_predict(result: Dict[str, Any], float_format: str) -> str:
    rows = result["rows"]
    headers = list(rows[0].keys()) if rows else ["p", "C_p", "X"]
    table = tabulate([[_num(row[h], float_format) for h in headers] for row in rows],
                     headers=headers, tablefmt="simple")
    p_star = result["p_star"]
    if p_star is None:
        note = "p*: none (capacity has no finite maximum)"
    else:
        note = f"p*: {p_star['location']:{float_format}} (integer {p_star['p_opt']})"
    return f"{table}\n\n{note}"


def format_bound(result: Dict[str, Any], float_format: str) -> str:
    headers = ["p", "synchronous_bound", "exact_throughput", "exact_residence", "usl_capacity"]
    table = tabulate([[_num(row[h], float_format) for h in headers] for row in result["rows"]],
                     headers=headers, tablefmt="simple")
    return (f"sigma = {result['sigma']:{float_format}}   kappa = {result['kappa']:{float_format}}\n\n{table}")


def format_simulate(result: Dict[str, Any], float_format: str, color: bool) -> str:
    runs = result.get("runs", [result])
    headers = ["p", "mode", "x_hat", "ci_halfwidth", "reference", "rel_error", "r_hat", "sync_fraction", "verdict"]
    rows = [[run["p"], run["mode"], _num(run["x_hat"], float_format), _num(run["ci_halfwidth"], float_format),
             _num(run["analytic_reference"], float_format), _num(run["relative_error"], float_format),
             _num(run["r_hat"], float_format), _num(run["sync_fraction"], float_format),
             verdict(run["passed"], color)] for run in runs]
    return tabulate(rows, headers=headers, tablefmt="simple")


def format_verify(result: Dict[str, Any], float_format: str, color: bool) -> str:
    rows = [[check["name"], _num(check["max_rel_error"], ".3e"), _num(check["tolerance"], ".0e"),
             verdict(check["passed"], color)] for check in result["checks"]]
    table = tabulate(rows, headers=["check", "max_rel_error", "tolerance", "verdict"], tablefmt="simple")
    failed = sum(1 for check in result["checks"] if not check["passed"])
    return f"{table}\n\n{len(result['checks']) - failed} passed, {failed} failed"


def format_report(report, float_format: str = ".6g", color: bool = False) -> str:
    """Format a report for text output."""
    if report.command == "fit":
        body = format_fit(report.result, float_format)
    elif report.command == "predict":
        body = format_predict(report.result, float_format)
    elif report.command == "bound":
        body = format_bound(report.result, float_format)
    elif report.command == "simulate":
        body = format_simulate(report.result, float_format, color)
    else:
        body = format_verify(report.result, float_format, color)

    lines = [body]
    if report.seed is not None:
        lines.append(f"seed: {report.seed}")
    for warning in report.warnings:
        lines.append(f"warning: {warning}")
    return "\n".join(lines)


def main(argv: Optional[List[str]] = None) -> int:
    """Main CLI function."""
    load_dotenv()
    parser = setup_argparse()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else EXIT_USAGE

    if not args.command:
        parser.print_help()
        return EXIT_USAGE

    try:
        config = load_config(args.config)
    except (OSError, ValueError, yaml.YAMLError) as e:
        print(f"Error: cannot load configuration: {e}", file=sys.stderr)
        return EXIT_USAGE

    configure_logging(config, args.log_level)
    settings = config.settings

    orchestrator = OrchestratorAgent(config)
    response = orchestrator.process(build_message(args))

    if response.get("status") != "success":
        error_type = response.get("error_type", "internal_error")
        print(f"Error ({error_type}): {response.get('message', 'unknown error')}", file=sys.stderr)
        return EXIT_USAGE if error_type in USAGE_ERRORS else EXIT_FAILURE

    report = response["report"]
    indent = settings.get("json_indent", 2)
    if args.json:
        text = report.to_json(indent)
    else:
        color = args.output_file is None and sys.stdout.isatty()
        text = format_report(report, settings.get("float_format", ".6g"), color)

    try:
        if args.output_file and args.json:
            report.save(args.output_file, indent)
        elif args.output_file:
            with open(args.output_file, "w") as f:
                f.write(text + "\n")
            logger.info(f"Report written to {args.output_file}")
        else:
            print(text)
        if args.curve_out:
            report.write_curve(args.curve_out)
    except (OSError, ValueError) as e:
        print(f"Error: cannot write output: {e}", file=sys.stderr)
        return EXIT_USAGE

    return EXIT_OK if response["passed"] else EXIT_FAILURE


if __name__ == "__main__":
    sys.exit(main())
