"""Command-line front end: toy sweeps, probability tables, sampling, hafnians and the validation suite."""
import argparse
import logging
import sys
from typing import Callable, Dict, List, Optional

from pydantic import ValidationError

from hybridgbs.api.v1.common import CalcSettings
from hybridgbs.api.v1.run_config import RunConfig

from . import requests
from .container import LOG_LEVEL, Container
from .data.readers import read_run_config
from .data.writers import (
    format_hafnian,
    output_stream,
    write_probability_csv,
    write_report_json,
    write_samples_csv,
    write_sweep_csv,
)
from .kernel.errors import ConfigurationError, HybridGbsError
from .utils.helpers import get_env

MODES = ["toy-sweep", "probs", "sample", "hafnian", "validate"]

EXIT_OK, EXIT_FAILURE, EXIT_CONFIGURATION = 0, 1, 2


def build_argparser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hybridgbs", description="Hybrid atom-photon Gaussian boson sampling.")
    p.add_argument("mode", choices=MODES, help="Operation to run.")
    p.add_argument("--config", type=str, default=None, help="JSON run configuration.")
    p.add_argument("--output", type=str, default=None, help="Output file (default: standard output).")
    p.add_argument("--seed", type=int, default=None, help="Seed of the sample generator.")
    p.add_argument("--gamma", type=float, default=None, help="Toy coupling γ/ε.")
    p.add_argument("--temperature", type=float, default=None, help="Effective temperature T/ε.")
    p.add_argument("--cutoff", type=int, default=None, help="Bound on the total count of enumerated patterns.")
    p.add_argument("--count", type=int, default=None, help="Number of samples.")
    p.add_argument("--workers", type=int, default=None, help="Worker threads.")
    p.add_argument("--log-level", type=str, default=None, help=f"Logging level (default: ${LOG_LEVEL} or WARNING).")
    return p


def load_config(args: argparse.Namespace) -> RunConfig:
    """Configuration file (if any) with command-line flags applied on top."""
    data = read_run_config(args.config).dict(by_alias=True, exclude_none=True) if args.config else {}
    data["mode"] = args.mode
    flags = {
        "output_path": args.output,
        "seed": args.seed,
        "cutoff": args.cutoff,
        "count": args.count,
        "T_eff": args.temperature,
        "workers": args.workers,
    }
    data.update({k: v for k, v in flags.items() if v is not None})
    if args.gamma is not None:
        data["toy"] = {**data.get("toy", {}), "gamma": args.gamma}
    return RunConfig(**data)


def run(cfg: RunConfig, settings: CalcSettings) -> int:
    return _RUNNERS[cfg.mode](cfg, settings)


def main(argv: Optional[List[str]] = None) -> int:
    args = build_argparser().parse_args(argv)
    try:
        level = (args.log_level or get_env(LOG_LEVEL, "WARNING") or "WARNING").upper()
        logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(message)s")
        cfg = load_config(args)
        settings = Container().calc_settings()
    except (ConfigurationError, ValidationError, FileNotFoundError, ValueError) as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIGURATION
    try:
        return run(cfg, settings)
    except FileNotFoundError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIGURATION
    except ConfigurationError as e:
        print(f"configuration error: {e}", file=sys.stderr)
        return EXIT_CONFIGURATION
    except HybridGbsError as e:
        logging.debug("run failed", exc_info=True)
        print(f"{type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_FAILURE


def _toy_sweep(cfg: RunConfig, settings: CalcSettings) -> int:
    response = requests.run_toy_sweep(cfg, settings)
    with output_stream(cfg.output_path) as out:
        write_sweep_csv(out, response)
    return EXIT_OK


def _probs(cfg: RunConfig, settings: CalcSettings) -> int:
    response = requests.run_probs(cfg, settings)
    with output_stream(cfg.output_path) as out:
        write_probability_csv(out, response)
    return EXIT_OK


def _sample(cfg: RunConfig, settings: CalcSettings) -> int:
    response = requests.run_sample(cfg, settings)
    with output_stream(cfg.output_path) as out:
        write_samples_csv(out, response)
    return EXIT_OK


def _hafnian(cfg: RunConfig, settings: CalcSettings) -> int:
    response = requests.run_hafnian(cfg, settings)
    with output_stream(cfg.output_path) as out:
        out.write(format_hafnian(complex(response.real, response.imag)) + "\n")
    return EXIT_OK


def _validate(cfg: RunConfig, settings: CalcSettings) -> int:
    report = requests.run_validate(cfg, settings)
    with output_stream(cfg.output_path) as out:
        write_report_json(out, report)
    failed = [c.name for c in report.checks if c.status == "fail"]
    if failed:
        logging.warning("validation failed: %s", ", ".join(failed))
    return EXIT_OK if report.passed else EXIT_FAILURE


_RUNNERS: Dict[str, Callable[[RunConfig, CalcSettings], int]] = {
    "toy-sweep": _toy_sweep,
    "probs": _probs,
    "sample": _sample,
    "hafnian": _hafnian,
    "validate": _validate,
}
