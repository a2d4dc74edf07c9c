"""
CLI - Точка входа
=================

Подкоманды:
    run       замкнутый цикл (одна или N репликаций)
    validate  проверка файла конфигурации без запуска
    export    конвертация сохранённой траектории csv ↔ json

Коды выхода: 0 успех, 2 ошибка конфигурации, 3 ошибка выполнения.
Ошибка печатается в stderr одной JSON-записью.
"""

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

from app.core.config import settings
from app.core.errors import ConfigError, SimulationError
from app.core.logger import logger
from app.simulation.engine import run_simulation
from app.simulation.replications import run_replications
from app.simulation.reports import FORMATS, ReportGenerator, json_safe
from app.simulation.run_config import build_run_config, validate_config

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

# флаг CLI → поле RunConfig
RUN_FLAGS = (
    "scenario",
    "horizon",
    "seed",
    "beta",
    "theta",
    "t0",
    "mu",
    "a0_const",
    "d",
    "sigma",
    "out",
    "format",
    "replications",
    "regret",
    "inner_steps",
    "step_rule",
    "lipschitz",
    "control_weight",
    "samples",
    "c_fallback",
    "learning_bound",
    "switch_interval",
)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="robust-online",
        description="Online learning and distributionally robust optimization simulator",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="Run a seeded closed-loop experiment")
    run.add_argument("--config", type=Path, help="Flat key=value config file")
    run.add_argument("--scenario", choices=["oscillator", "allocation"])
    run.add_argument("--horizon", type=int)
    run.add_argument("--seed", type=int)
    run.add_argument("--beta", type=float, help="Confidence parameter β ∈ (0,1)")
    run.add_argument("--theta", type=float, help="Slack θ ≥ 0")
    run.add_argument("--t0", type=int, help="Window length T0")
    run.add_argument("--mu", type=float, help="Smoothing scale μ")
    run.add_argument("--a0-const", dest="a0_const", type=float, help="Concentration constant a0")
    run.add_argument("--d", type=float, help="Regularization bound d")
    run.add_argument("--sigma", type=float, help="Noise scale σ (the learning σ is h·σ)")
    run.add_argument("--c-fallback", dest="c_fallback", type=float, help="c used when σ_min(A) = 0")
    run.add_argument(
        "--learning-bound",
        dest="learning_bound",
        choices=("certified", "calibrated"),
        help="Learning constant c: worst-case formula or residual-calibrated",
    )
    run.add_argument("--out", type=Path, help="Output directory")
    run.add_argument("--format", choices=FORMATS)
    run.add_argument("--replications", type=int)
    run.add_argument("--regret", action="store_const", const=True, help="Enable regret diagnostics")
    run.add_argument("--samples", type=int, help="Monte-Carlo samples per step for regret")
    run.add_argument("--inner-steps", dest="inner_steps", type=int)
    run.add_argument("--step-rule", dest="step_rule", choices=["inverse-lipschitz", "monotone"])
    run.add_argument("--lipschitz", choices=["certified", "nominal"])
    run.add_argument("--control-weight", dest="control_weight", type=float)
    run.add_argument("--switch-interval", dest="switch_interval", type=int)

    validate = sub.add_parser("validate", help="Check a config file without running")
    validate.add_argument("path", type=Path)

    export = sub.add_parser("export", help="Convert a stored trajectory")
    export.add_argument("--input", required=True, type=Path)
    export.add_argument("--format", required=True, choices=FORMATS)
    export.add_argument("--out", required=True, type=Path)

    return parser


def emit_error(error: SimulationError) -> None:
    print(json.dumps(json_safe({"error": error.to_dict()})), file=sys.stderr)


def _overrides(args: argparse.Namespace) -> Dict[str, Any]:
    return {name: getattr(args, name) for name in RUN_FLAGS if getattr(args, name, None) is not None}


def cmd_run(args: argparse.Namespace) -> int:
    config = build_run_config(args.config, _overrides(args))
    out_dir = config.out if config.out is not None else settings.output_dir
    reports = ReportGenerator(out_dir)

    if config.replications > 1:
        merged = run_replications(config, out_dir, settings.workers)
        reports.write_summary(merged)
        if merged["failed"]:
            emit_error(SimulationError(f"{merged['failed']} replication(s) failed", failed=merged["failed"]))
            return EXIT_RUNTIME
        return EXIT_OK

    result = run_simulation(config)
    reports.write_trajectory(
        result.record,
        config.format,
        out_dir / f"trajectory.{config.format}",
        summary=result.summary,
        allow_empty=not result.ok,
    )
    reports.write_summary(result.summary)
    logger.info("\n" + reports.generate_summary(result.summary))

    if result.error is not None:
        emit_error(result.error)
        return EXIT_RUNTIME
    return EXIT_OK


def cmd_validate(args: argparse.Namespace) -> int:
    problems = validate_config(args.path)
    print(json.dumps({"path": str(args.path), "valid": not problems, "problems": problems}, indent=2))
    return EXIT_OK if not problems else EXIT_CONFIG


def cmd_export(args: argparse.Namespace) -> int:
    ReportGenerator().export(args.input, args.format, args.out)
    return EXIT_OK


COMMANDS = {"run": cmd_run, "validate": cmd_validate, "export": cmd_export}


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args)
    except ConfigError as e:
        emit_error(e)
        return EXIT_CONFIG
    except SimulationError as e:
        emit_error(e)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
