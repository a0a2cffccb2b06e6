"""
Command-line entry point.

Subcommands:
    solve       optimal design for a scenario
    sweep       run a sweep and write CSV/JSON plot data
    capacity    Monte Carlo vs closed-form capacity at one allocation
    thresholds  LoS budget thresholds and the power regime
"""

import argparse
import json
import logging
import math
import sys
import time
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional

from .allocation import (
    PowerRegime,
    aligned_reflection,
    allocate_los,
    allocate_rayleigh,
    allocate_search,
    amplification_budget,
    evaluate_allocation,
    noise_ratio,
    power_regime,
    select_architecture,
    thresholds,
)
from .capacity import mc_ergodic_capacity
from .channel import statistical_csi
from .config import PRESET_NAMES, ScenarioConfig, load_config, load_preset, parse_config
from .errors import ConfigError, OutputError, ParameterError, RegimeError, SimulatorError
from .params import describe
from .sweeps import format_rows, landmark_report, run_sweep, write_output
from .telemetry import configure_logging, log_event
from .validators import create_success_response, create_validation_error_response

logger = logging.getLogger(__name__)

# relative tolerance floor of the MC vs approximation check
MC_RELATIVE_TOLERANCE = 0.05

EXIT_OK = 0
EXIT_RUNTIME_ERROR = 1
EXIT_USAGE_ERROR = 2


def _emit(payload: Dict[str, Any], stream=None):
    stream = stream or sys.stdout
    stream.write(json.dumps(payload, default=_json_default, allow_nan=False) + "\n")


def _json_default(value: Any):
    if hasattr(value, "tolist"):
        return value.tolist()
    if hasattr(value, "value"):
        return value.value
    return str(value)


def _finite(value: Optional[float]) -> Optional[float]:
    if value is None or math.isnan(value):
        return None
    if math.isinf(value):
        return "inf" if value > 0 else "-inf"
    return value


def _clean(data: Any) -> Any:
    if isinstance(data, dict):
        return {k: _clean(v) for k, v in data.items()}
    if isinstance(data, list):
        return [_clean(v) for v in data]
    if isinstance(data, float):
        return _finite(data)
    return data


def _load_scenario(args: argparse.Namespace) -> ScenarioConfig:
    if args.preset and args.config:
        raise ConfigError("use either --preset or --config, not both")
    if args.preset:
        cfg = load_preset(args.preset)
    elif args.config:
        cfg = load_config(args.config)
    else:
        cfg = parse_config({}, "defaults")
    return cfg.with_overrides(
        seed=args.seed, samples=args.samples, out=args.out, fmt=args.format, workers=args.workers
    )


def handle_solve(cfg: ScenarioConfig, args: argparse.Namespace) -> Dict[str, Any]:
    params = cfg.params
    regime = power_regime(params)
    data: Dict[str, Any] = {
        "params": describe(params),
        "regime": regime.value,
        "search": allocate_search(params).to_dict(),
    }
    closed_form = None
    if regime is PowerRegime.FAVORABLE and params.pure_los:
        closed_form = allocate_los
    elif regime is PowerRegime.FAVORABLE and params.rayleigh:
        closed_form = allocate_rayleigh
    if closed_form is not None:
        try:
            data["closed_form"] = closed_form(params).to_dict()
        except RegimeError as e:
            logger.warning(f"closed form skipped: {e}")
            data["closed_form_skipped"] = str(e)
    return data


def handle_sweep(cfg: ScenarioConfig, args: argparse.Namespace) -> Dict[str, Any]:
    rows = run_sweep(cfg)
    data: Dict[str, Any] = {"rows": len(rows), "format": cfg.output.format}

    if cfg.output.path:
        data["path"] = str(write_output(rows, cfg.output.path, cfg.output.format))
    else:
        sys.stdout.write(format_rows(rows, cfg.output.format))

    report = landmark_report(cfg, rows)
    if report:
        data["landmarks"] = report
        if cfg.output.path:
            report_path = Path(cfg.output.path).with_suffix(".landmark.json")
            try:
                report_path.write_text(json.dumps(_clean(report), indent=2) + "\n", encoding="utf-8")
            except OSError as e:
                raise OutputError(f"failed to write landmark report ({e.strerror or e})", str(report_path))
            data["landmark_path"] = str(report_path)
    return data


def handle_capacity(cfg: ScenarioConfig, args: argparse.Namespace) -> Dict[str, Any]:
    params = cfg.params
    if cfg.allocation is not None:
        design = evaluate_allocation(params, cfg.allocation.n_act, cfg.allocation.n_pas)
    else:
        design = allocate_search(params)
    csi = statistical_csi(params, design.alloc, layout=cfg.layout)
    reflection = aligned_reflection(csi, design.alpha or 1.0)
    estimate = mc_ergodic_capacity(
        params, design.alloc, reflection, cfg.mc.n_samples, cfg.mc.seed,
        layout=cfg.layout, workers=cfg.mc.workers,
    )
    gap = estimate.mean - design.capacity
    tolerance = max(MC_RELATIVE_TOLERANCE * design.capacity, 3.0 * estimate.std_error)
    return {
        "n_act": design.alloc.n_act,
        "n_pas": design.alloc.n_pas,
        "alpha": design.alpha,
        "approx_capacity": design.capacity,
        "mc_mean": estimate.mean,
        "mc_std_error": estimate.std_error,
        "mc_samples": estimate.n_samples,
        "seed": cfg.mc.seed,
        "gap": gap,
        "tolerance": tolerance,
        "within_tolerance": abs(gap) <= tolerance,
    }


def handle_thresholds(cfg: ScenarioConfig, args: argparse.Namespace) -> Dict[str, Any]:
    params = cfg.params
    limits = thresholds(params, strict=False)
    data = {
        "w_ah": limits.w_ah,
        "w_ap": limits.w_ap,
        "w_hp": limits.w_hp,
        "ordered": limits.ordered,
        "noise_ratio": noise_ratio(params),
        "amplification_budget": amplification_budget(params),
        "regime": power_regime(params).value,
    }
    if params.pure_los and limits.ordered:
        data["architecture"] = select_architecture(params).value
    return data


HANDLERS: Dict[str, Callable[[ScenarioConfig, argparse.Namespace], Dict[str, Any]]] = {
    "solve": handle_solve,
    "sweep": handle_sweep,
    "capacity": handle_capacity,
    "thresholds": handle_thresholds,
}


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="hybrid-irs",
        description="Hybrid active/passive IRS link simulator",
        epilog="""
Examples:
  %(prog)s solve                                  # optimal design for the default scenario
  %(prog)s thresholds --config los.json           # budget thresholds for a LoS scenario
  %(prog)s sweep --preset fig5 --seed 7 --out fig5.csv
  %(prog)s capacity --config scenario.json --samples 1000
        """,
        formatter_class=argparse.RawDescriptionHelpFormatter,
    )
    parser.add_argument("-v", "--verbose", action="count", default=0, help="Increase log verbosity")

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="Scenario JSON file")
    common.add_argument("--preset", choices=PRESET_NAMES, help="Committed figure preset")
    common.add_argument("--out", help="Output file (sweep)")
    common.add_argument("--format", choices=("csv", "json"), help="Output format (default: csv)")
    common.add_argument("--seed", type=int, help="Monte Carlo master seed (unsigned 64-bit)")
    common.add_argument("--samples", type=int, help="Monte Carlo samples per point")
    common.add_argument("--workers", type=int, help="Worker threads (default: HYBRID_IRS_WORKERS or 1)")

    subparsers = parser.add_subparsers(dest="command", metavar="command")
    subparsers.add_parser("solve", parents=[common], help="Print the optimal design")
    subparsers.add_parser("sweep", parents=[common], help="Run a sweep and write plot data")
    subparsers.add_parser("capacity", parents=[common], help="Monte Carlo vs approximation at one allocation")
    subparsers.add_parser("thresholds", parents=[common], help="Print budget thresholds and regime")
    return parser


def cli_main(argv: Optional[List[str]] = None) -> int:
    """
    Run one CLI command.

    Args:
        argv: Arguments without the program name (sys.argv[1:] when None)

    Returns:
        Process exit code
    """
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else argv
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_USAGE_ERROR

    if not args.command:
        parser.print_usage(sys.stderr)
        return EXIT_USAGE_ERROR

    configure_logging(args.verbose)
    start_time = time.time()
    try:
        cfg = _load_scenario(args)
    except (ConfigError, ParameterError) as e:
        logger.error(f"Configuration error: {e}")
        _emit(create_validation_error_response(e), sys.stderr)
        return EXIT_USAGE_ERROR

    try:
        data = HANDLERS[args.command](cfg, args)
    except ConfigError as e:
        logger.error(f"Configuration error: {e}")
        _emit(create_validation_error_response(e), sys.stderr)
        return EXIT_USAGE_ERROR
    except SimulatorError as e:
        logger.error(f"{args.command} failed: {e}", exc_info=args.verbose > 1)
        _emit(create_validation_error_response(e), sys.stderr)
        return EXIT_RUNTIME_ERROR

    log_event("command_completed", {"command": args.command, "duration_ms": (time.time() - start_time) * 1000})
    # sweep without --out already streamed its rows to stdout
    stream = sys.stderr if args.command == "sweep" and not cfg.output.path else sys.stdout
    _emit(create_success_response(f"{args.command} completed", _clean(data)), stream)
    return EXIT_OK


def main() -> int:
    return cli_main()


if __name__ == "__main__":
    sys.exit(main())
