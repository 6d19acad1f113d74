"""
Command-line entry point.

    python main.py run --config a.json [b.json ...] [--jobs N]
    python main.py compare RUN_DIR RUN_DIR [...] [--output table.csv]
    python main.py plot-data RUN_DIR
    python main.py baseline-bk --config a.json

Exit codes: 0 success, 2 config error, 3 runtime/numerical failure, 4 I/O.
"""

import argparse
import json
import logging
import os
import sys
from pathlib import Path

from dotenv import load_dotenv

sys.path.insert(0, os.path.abspath(os.path.dirname(__file__)))
load_dotenv("./.env", override=False)

import sentry_sdk

from app.container import ApplicationContainer, get_wire_container
from app.controllers.harness.config import load_run_config
from app.exceptions import BaseError, ErrorType, ExitCode
from logging_config import setup_logging
from settings import settings
from workers.batch_manager import BatchManager

logger = logging.getLogger(__name__)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="nfl", description="Memory-free continual learning experiments")
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="run one or more experiment configs")
    run.add_argument("--config", type=Path, nargs="+", required=True)
    run.add_argument("--jobs", type=int, default=1, help="parallel worker processes for several configs")

    compare = commands.add_parser("compare", help="compare finished runs side by side")
    compare.add_argument("run_dirs", type=Path, nargs="+")
    compare.add_argument("--output", type=Path, default=None, help="also write the table as CSV")

    plot = commands.add_parser("plot-data", help="write acc_curve.csv for a finished run")
    plot.add_argument("run_dir", type=Path)

    baseline = commands.add_parser("baseline-bk", help="random-init accuracy b_k for every task of a config")
    baseline.add_argument("--config", type=Path, required=True)
    return parser


def _print_json(payload: object) -> None:
    print(json.dumps(payload, indent=2))


def cmd_run(args: argparse.Namespace, container: ApplicationContainer) -> int:
    configs = [load_run_config(path) for path in args.config]
    if len(configs) > 1 or args.jobs > 1:
        exit_codes = BatchManager(args.jobs).run(configs)
        _print_json({"runs": [config.output_dir for config in configs], "exit_codes": exit_codes})
        return max(exit_codes)

    artifacts = container.controllers.experiment_runner().run_experiment(configs[0])
    _print_json({"run_dir": str(artifacts.run_dir), "metrics": json.loads(artifacts.metrics.read_text())})
    return int(ExitCode.SUCCESS)


def cmd_compare(args: argparse.Namespace, container: ApplicationContainer) -> int:
    builder = container.controllers.comparison_builder()
    table = builder.compare(args.run_dirs)
    print(builder.to_text(table), end="")
    if args.output is not None:
        builder.write(table, args.output)
    return int(ExitCode.SUCCESS)


def cmd_plot_data(args: argparse.Namespace, container: ApplicationContainer) -> int:
    output = container.controllers.plot_data_builder().write(args.run_dir)
    _print_json({"acc_curve": str(output)})
    return int(ExitCode.SUCCESS)


def cmd_baseline_bk(args: argparse.Namespace, container: ApplicationContainer) -> int:
    config = load_run_config(args.config)
    runner = container.controllers.experiment_runner()
    stream, spec = runner.build_stream(config)
    _print_json({"b": runner.baseline_vector(config, stream, spec), "num_seeds": config.fwt_baseline_seeds})
    return int(ExitCode.SUCCESS)


COMMANDS = {
    "run": cmd_run,
    "compare": cmd_compare,
    "plot-data": cmd_plot_data,
    "baseline-bk": cmd_baseline_bk,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    setup_logging()
    container = get_wire_container()
    try:
        return COMMANDS[args.command](args, container)
    except BaseError as exc:
        logger.error(f"{args.command} failed: {exc}")
        _print_json(exc.to_dict())
        return int(exc.exit_code)
    except Exception as exc:
        logger.exception(f"{args.command} failed unexpectedly")
        _print_json(
            {"error": ErrorType.UNHANDLED_EXCEPTION.value, "message": str(exc), "exit_code": int(ExitCode.RUNTIME)}
        )
        return int(ExitCode.RUNTIME)


if __name__ == "__main__":
    if settings.sentry.is_enabled:
        sentry_sdk.init(dsn=settings.sentry.dsn, environment=settings.environment.value)
    sys.exit(main())
