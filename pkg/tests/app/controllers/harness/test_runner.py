import json
from pathlib import Path
from typing import Any

import numpy as np
import pytest

from app.controllers.harness.registry import LearnerRegistry
from app.controllers.harness.runner import ACC_MATRIX_FILE, METRICS_FILE, RUN_META_FILE, ExperimentRunner
from app.controllers.learners.base import ContinualLearner
from app.controllers.learners.state import NflState
from app.controllers.metrics.accuracy_csv import read_accuracy_csv
from app.controllers.metrics.scores import compute_report
from app.controllers.scenarios.evaluation import Evaluator
from app.controllers.scenarios.loaders import DatasetBuilder
from app.controllers.scenarios.stream_cursor import StreamCursor
from app.exceptions import DataFormatError
from app.models.run_config import RunConfig
from app.models.stream import LabeledSet, TaskData
from tests.app.toy_streams import blob_run_config


def _runner(tmp_path: Path) -> ExperimentRunner:
    return ExperimentRunner(DatasetBuilder(tmp_path), Evaluator(), LearnerRegistry())


def _metrics(run_dir: Path) -> dict[str, Any]:
    return json.loads((run_dir / METRICS_FILE).read_text())


class TestExperimentRunner:
    def test_finetune_run_writes_every_artifact(self, tmp_path: Path) -> None:
        artifacts = _runner(tmp_path).run_experiment(blob_run_config(tmp_path / "run"))
        matrix = read_accuracy_csv(artifacts.acc_matrix)
        assert matrix.shape == (2, 2)
        assert not np.isnan(matrix).any()
        metrics = _metrics(artifacts.run_dir)
        assert set(metrics) == {"acc", "fwt", "bwt", "af", "intransigence", "ps", "b", "a_star"}
        meta = json.loads(artifacts.run_meta.read_text())
        assert meta["config"]["method"] == "finetune"
        assert meta["memory"]["exemplar_bytes"] == 0
        assert meta["memory"]["total_bytes"] == 4 * meta["parameter_count"]
        assert sorted(label for group in meta["class_order"] for label in group) == [0, 1, 2, 3]
        assert artifacts.params_dir is not None
        assert (artifacts.params_dir / "task_0" / "params_trained.bin").is_file()
        assert (artifacts.params_dir / "task_1" / "params_trained.bin").is_file()

    def test_same_config_same_bytes(self, tmp_path: Path) -> None:
        runner = _runner(tmp_path)
        first = runner.run_experiment(blob_run_config(tmp_path / "first", method="nfl"))
        second = runner.run_experiment(blob_run_config(tmp_path / "second", method="nfl"))
        assert first.acc_matrix.read_bytes() == second.acc_matrix.read_bytes()
        assert first.metrics.read_bytes() == second.metrics.read_bytes()

    def test_metrics_recompute_from_the_written_matrix(self, tmp_path: Path) -> None:
        artifacts = _runner(tmp_path).run_experiment(blob_run_config(tmp_path / "run", a_star=0.95))
        metrics = _metrics(artifacts.run_dir)
        recomputed = compute_report(read_accuracy_csv(artifacts.acc_matrix), metrics["b"], metrics["a_star"])
        assert recomputed.model_dump() == metrics

    def test_nfl_plus_artifacts(self, tmp_path: Path) -> None:
        artifacts = _runner(tmp_path).run_experiment(blob_run_config(tmp_path / "run", method="nfl_plus"))
        assert artifacts.params_dir is not None
        assert (artifacts.params_dir / "task_0" / "params_autoencoder.bin").is_file()
        final = artifacts.params_dir / "task_1"
        assert {path.name for path in final.iterdir()} == {
            "params_f+.bin",
            "params_autoencoder.bin",
            "params_bias.bin",
        }
        meta = json.loads(artifacts.run_meta.read_text())
        # trunk 2x16 + 16, two heads of 16x2 + 2 plus their stored copies, encoder 4x16 once four classes are old
        assert meta["parameter_count"] == 48 + 2 * 34 + 2 * 34 + 64

    def test_joint_echoes_its_own_a_star(self, tmp_path: Path) -> None:
        artifacts = _runner(tmp_path).run_experiment(blob_run_config(tmp_path / "joint", method="joint"))
        matrix = read_accuracy_csv(artifacts.acc_matrix)
        metrics = _metrics(artifacts.run_dir)
        assert metrics["a_star"] == matrix[-1, -1]
        assert metrics["intransigence"] == 0.0

    def test_a_star_from_reference_run(self, tmp_path: Path) -> None:
        runner = _runner(tmp_path)
        joint = runner.run_experiment(blob_run_config(tmp_path / "joint", method="joint"))
        config = blob_run_config(tmp_path / "finetune", reference_run_dir=str(joint.run_dir), save_params=False)
        artifacts = runner.run_experiment(config)
        assert _metrics(artifacts.run_dir)["a_star"] == _metrics(joint.run_dir)["a_star"]
        assert artifacts.params_dir is None
        assert not (artifacts.run_dir / "params").exists()

    def test_reference_without_a_star(self, tmp_path: Path) -> None:
        runner = _runner(tmp_path)
        plain = runner.run_experiment(blob_run_config(tmp_path / "plain"))
        with pytest.raises(DataFormatError):
            runner.run_experiment(blob_run_config(tmp_path / "next", reference_run_dir=str(plain.run_dir)))

    def test_without_previews(self, tmp_path: Path) -> None:
        artifacts = _runner(tmp_path).run_experiment(blob_run_config(tmp_path / "run", fwt=False))
        matrix = read_accuracy_csv(artifacts.acc_matrix)
        assert np.isnan(matrix[0, 1])
        metrics = _metrics(artifacts.run_dir)
        assert metrics["fwt"] is None
        assert metrics["b"] is None

    def test_stored_heads_count_towards_nfl_memory(self, tmp_path: Path) -> None:
        runner = _runner(tmp_path)
        nfl = json.loads(runner.run_experiment(blob_run_config(tmp_path / "nfl", method="nfl")).run_meta.read_text())
        finetune = json.loads(runner.run_experiment(blob_run_config(tmp_path / "finetune")).run_meta.read_text())
        assert finetune["parameter_count"] == 48 + 2 * 34
        assert nfl["parameter_count"] == finetune["parameter_count"] + 2 * 34
        assert nfl["memory"]["total_bytes"] == 4 * nfl["parameter_count"]

    @pytest.mark.parametrize("method", ["finetune", "lwf", "nfl", "nfl_plus"])
    def test_learners_only_receive_the_current_task(
        self, tmp_path: Path, monkeypatch: pytest.MonkeyPatch, method: str
    ) -> None:
        served: list[int] = []
        received: list[int] = []
        train_data = StreamCursor.train_data
        create = LearnerRegistry.create

        def serving(cursor: StreamCursor, task_id: int) -> LabeledSet:
            served.append(task_id)
            return train_data(cursor, task_id)

        def recording_create(registry: LearnerRegistry, config: RunConfig) -> ContinualLearner:
            learner = create(registry, config)
            learn_task = learner.learn_task

            def recording(state: NflState, task: TaskData) -> NflState:
                received.append(task.task_id)
                assert state.task_count == task.task_id
                return learn_task(state, task)

            monkeypatch.setattr(learner, "learn_task", recording)
            return learner

        monkeypatch.setattr(StreamCursor, "train_data", serving)
        monkeypatch.setattr(LearnerRegistry, "create", recording_create)
        dataset = {"kind": "synthetic_blobs", "blobs": {"num_classes": 6}}
        _runner(tmp_path).run_experiment(blob_run_config(tmp_path / "run", method=method, dataset=dataset, num_tasks=3))
        assert served == [0, 1, 2]
        assert received == [1, 2]
        meta = json.loads((tmp_path / "run" / RUN_META_FILE).read_text())
        assert sorted({trace["task_id"] for trace in meta["traces"]}) == [0, 1, 2]

    def test_matrix_file_layout(self, tmp_path: Path) -> None:
        artifacts = _runner(tmp_path).run_experiment(blob_run_config(tmp_path / "run"))
        lines = (artifacts.run_dir / ACC_MATRIX_FILE).read_text().splitlines()
        assert len(lines) == 2
        assert all(len(cell.split(".")[1]) == 6 for line in lines for cell in line.split(","))
