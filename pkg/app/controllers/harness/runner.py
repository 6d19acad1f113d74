"""
Runs one configured experiment end to end and persists its artifacts:

    acc_matrix.csv      accuracy matrix, one row per training stage
    metrics.json        metrics recomputed from the CSV as written
    run_meta.json       config echo, wall time, parameter count, memory, training traces
    params/task_<k>/    parameter snapshots after each task (when save_params is set)
"""

import json
import logging
import time
from dataclasses import replace
from pathlib import Path
from typing import Any

import torch

from app.controllers.baselines.joint import JointTrainer
from app.controllers.learners.base import ContinualLearner
from app.controllers.learners.state import NflState
from app.controllers.metrics.accuracy_csv import empty_matrix, read_accuracy_csv, write_accuracy_csv
from app.controllers.metrics.memory import memory_footprint, to_megabytes
from app.controllers.metrics.random_baseline import random_baseline_accuracy
from app.controllers.metrics.scores import compute_report
from app.controllers.harness.registry import LearnerRegistry
from app.controllers.network.snapshot import SnapshotTag, snapshot, snapshot_module, write_snapshot
from app.controllers.scenarios.evaluation import Evaluator
from app.controllers.scenarios.loaders import DatasetBuilder
from app.controllers.scenarios.splits import split_classes
from app.controllers.scenarios.stream_cursor import StreamCursor
from app.exceptions import ArtifactIOError, DataFormatError
from app.models.network import LayerSpec, ModelSpec
from app.models.reports import MetricsReport, RunArtifacts
from app.models.run_config import MethodName, RunConfig
from app.models.stream import TaskStream

logger = logging.getLogger(__name__)

ACC_MATRIX_FILE = "acc_matrix.csv"
METRICS_FILE = "metrics.json"
RUN_META_FILE = "run_meta.json"
PARAMS_DIR = "params"


def write_json(payload: dict[str, Any], path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    except OSError as exc:
        raise ArtifactIOError(f"Could not write {path}: {exc}", path=str(path)) from exc
    return path


def read_metrics(run_dir: Path) -> MetricsReport:
    path = run_dir / METRICS_FILE
    try:
        return MetricsReport.model_validate_json(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ArtifactIOError(f"Could not read {path}: {exc}", path=str(path)) from exc
    except ValueError as exc:
        raise DataFormatError(f"{path} is not a metrics report: {exc}", path=str(path)) from exc


class ExperimentRunner:
    def __init__(
        self,
        dataset_builder: DatasetBuilder,
        evaluator: Evaluator,
        learner_registry: LearnerRegistry,
        torch_num_threads: int = 1,
    ) -> None:
        self._dataset_builder = dataset_builder
        self._evaluator = evaluator
        self._learner_registry = learner_registry
        self._torch_num_threads = torch_num_threads

    def build_stream(self, config: RunConfig) -> tuple[TaskStream, ModelSpec]:
        train, test = self._dataset_builder.build(config.dataset, seed=config.seed)
        stream = split_classes(train, test, config.num_tasks, config.mode, config.seed)
        spec = ModelSpec(input_dim=train.input_dim, trunk_layers=[LayerSpec(width=w) for w in config.trunk_widths])
        return stream, spec

    def baseline_vector(self, config: RunConfig, stream: TaskStream, spec: ModelSpec) -> list[float]:
        return [
            random_baseline_accuracy(
                spec,
                task,
                config.fwt_baseline_seeds,
                config.seed,
                mode=config.mode,
                earlier_class_counts=stream.class_counts[: task.task_id],
            )
            for task in stream.tasks
        ]

    def run_experiment(self, config: RunConfig) -> RunArtifacts:
        started = time.perf_counter()
        torch.set_num_threads(self._torch_num_threads)
        run_dir = Path(config.output_dir)
        logger.info(
            f"Running {config.method.value} on {config.dataset.kind.value} ({config.num_tasks} tasks) -> {run_dir}"
        )

        stream, spec = self.build_stream(config)
        learner = self._learner_registry.create(config)
        cursor = StreamCursor(stream)
        size = len(stream)
        matrix = empty_matrix(size)
        params_dir = run_dir / PARAMS_DIR if config.save_params else None

        state: NflState | None = None
        for stage in range(size):
            task = cursor.advance()
            state = self._train_stage(learner, spec, cursor, state)
            matrix[stage, : stage + 1] = self._evaluator.evaluate(state.model, stream, config.mode)
            if config.fwt and stage + 1 < size:
                matrix[stage, stage + 1] = self._evaluator.preview_next_task(
                    state.model, stream, config.mode, learner.head_seed(stage + 1)
                )
            logger.info(f"Stage {task.task_id}: accuracies {[round(float(v), 4) for v in matrix[stage, : stage + 1]]}")
            if params_dir is not None:
                self._save_params(state, config.method, params_dir / f"task_{stage}")
        assert state is not None

        acc_path = write_accuracy_csv(matrix, run_dir / ACC_MATRIX_FILE)
        baseline = self.baseline_vector(config, stream, spec) if config.fwt and size > 1 else None
        persisted = read_accuracy_csv(acc_path)
        a_star = self._a_star(config, persisted[-1, -1])
        report = compute_report(persisted, baseline, a_star, config.ps_eps)
        metrics_path = write_json(report.model_dump(), run_dir / METRICS_FILE)

        parameter_count = state.model.parameter_count()
        if config.method in (MethodName.NFL, MethodName.NFL_PLUS):
            parameter_count += state.snapshot_parameter_count
        if state.autoencoder is not None:
            parameter_count += state.autoencoder.encoder_parameter_count()
        parameter_bytes = memory_footprint(parameter_count)
        run_meta = {
            "config": config.model_dump(mode="json", by_alias=True),
            "wall_time_s": time.perf_counter() - started,
            "parameter_count": parameter_count,
            "memory": {
                "parameter_bytes": parameter_bytes,
                "exemplar_bytes": 0,
                "total_bytes": parameter_bytes,
                "total_mb": to_megabytes(parameter_bytes),
            },
            "class_order": [list(task.class_ids) for task in stream.tasks],
            "traces": [trace.to_dict() for trace in state.traces],
        }
        meta_path = write_json(run_meta, run_dir / RUN_META_FILE)
        logger.info(f"Run finished: ACC={report.acc:.4f}, artifacts in {run_dir}")
        return RunArtifacts(
            run_dir=run_dir, acc_matrix=acc_path, metrics=metrics_path, run_meta=meta_path, params_dir=params_dir
        )

    @staticmethod
    def _train_stage(
        learner: ContinualLearner, spec: ModelSpec, cursor: StreamCursor, state: NflState | None
    ) -> NflState:
        if isinstance(learner, JointTrainer):
            return learner.joint_train(spec, cursor.union_train())
        current = cursor.current
        task = replace(current, train=cursor.train_data(current.task_id))
        if state is None:
            return learner.train_first_task(spec.with_head(task.num_classes), task)
        return learner.learn_task(state, task)

    @staticmethod
    def _a_star(config: RunConfig, last_entry: float) -> float | None:
        if config.method == MethodName.JOINT:
            return float(last_entry)
        if config.a_star is not None:
            return config.a_star
        if config.reference_run_dir is not None:
            reference = read_metrics(Path(config.reference_run_dir))
            if reference.a_star is None:
                raise DataFormatError(f"Reference run {config.reference_run_dir} does not record a_star")
            return reference.a_star
        return None

    @staticmethod
    def _save_params(state: NflState, method: MethodName, directory: Path) -> None:
        distilled = method in (MethodName.NFL, MethodName.NFL_PLUS) and state.task_count > 1
        tag = SnapshotTag.FURTHER_FINETUNED if distilled else SnapshotTag.TRAINED
        write_snapshot(snapshot(state.model, tag), directory)
        if state.autoencoder is not None:
            write_snapshot(snapshot_module(state.autoencoder, "autoencoder"), directory)
        if state.bias_corrector is not None:
            write_snapshot(snapshot_module(state.bias_corrector, "bias"), directory)
