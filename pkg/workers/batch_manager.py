"""
Parallel batch mode for `run --jobs N`: one worker process per run config, at most N alive.

Run configs must write to distinct output directories; nothing else is shared.
"""

import json
import logging
import multiprocessing as mp
import os
import sys
import time
from collections.abc import Sequence
from pathlib import Path

sys.path.insert(0, os.path.abspath(os.path.join(os.path.dirname(__file__), "../")))

from app.exceptions import BaseError, ConfigError, ErrorType, ExitCode
from app.models.run_config import RunConfig

logger = logging.getLogger(__name__)


def run_config_process(config_json: str) -> None:
    """Entry point for a worker process; the exit code follows the CLI convention."""
    from app.container import get_wire_container
    from logging_config import setup_logging

    setup_logging()
    config = RunConfig.model_validate_json(config_json)
    try:
        get_wire_container().controllers.experiment_runner().run_experiment(config)
    except BaseError as exc:
        logger.error(f"Run for {config.output_dir} failed: {exc}")
        print(json.dumps({**exc.to_dict(), "output_dir": config.output_dir}), flush=True)
        sys.exit(int(exc.exit_code))
    except Exception as exc:
        logger.exception(f"Run for {config.output_dir} failed unexpectedly")
        payload = {
            "error": ErrorType.UNHANDLED_EXCEPTION.value,
            "message": str(exc),
            "exit_code": int(ExitCode.RUNTIME),
            "output_dir": config.output_dir,
        }
        print(json.dumps(payload), flush=True)
        sys.exit(int(ExitCode.RUNTIME))


class BatchManager:
    """Runs independent experiments in parallel worker processes."""

    def __init__(self, num_jobs: int, poll_interval: float = 0.2) -> None:
        if num_jobs < 1:
            raise ConfigError(f"--jobs must be at least 1, got {num_jobs}")
        self._num_jobs = num_jobs
        self._poll_interval = poll_interval
        self._context = mp.get_context("spawn")

    @staticmethod
    def check_disjoint_outputs(configs: Sequence[RunConfig]) -> None:
        seen: dict[Path, int] = {}
        for index, config in enumerate(configs):
            output = Path(config.output_dir).resolve()
            if output in seen:
                raise ConfigError(
                    f"Configs {seen[output]} and {index} both write to {output}", output_dir=str(output)
                )
            seen[output] = index

    def run(self, configs: Sequence[RunConfig]) -> list[int]:
        """Exit code of every config, in input order."""
        self.check_disjoint_outputs(configs)
        logger.info(f"Starting batch of {len(configs)} runs with {self._num_jobs} parallel workers")

        pending = list(enumerate(configs))
        running: dict[int, mp.process.BaseProcess] = {}
        exit_codes: list[int] = [int(ExitCode.SUCCESS)] * len(configs)

        while pending or running:
            while pending and len(running) < self._num_jobs:
                index, config = pending.pop(0)
                process = self._context.Process(
                    target=run_config_process, args=(config.model_dump_json(by_alias=True),), name=f"run-{index}"
                )
                process.start()
                running[index] = process
                logger.info(f"Started {process.name} (PID: {process.pid}) for {config.output_dir}")

            for index, process in list(running.items()):
                if process.is_alive():
                    continue
                process.join()
                exit_codes[index] = process.exitcode if process.exitcode is not None else int(ExitCode.RUNTIME)
                if exit_codes[index] != ExitCode.SUCCESS:
                    logger.error(f"Worker {process.name} failed (exit code: {process.exitcode})")
                del running[index]
            if running:
                time.sleep(self._poll_interval)

        logger.info(f"Batch finished: {sum(code == 0 for code in exit_codes)}/{len(configs)} runs succeeded")
        return exit_codes
