import argparse
import json
from pathlib import Path
from typing import Any

import pytest

import main as cli
from app.container import ApplicationContainer
from tests.app.toy_streams import blob_run_config


def _config_file(tmp_path: Path, **overrides: object) -> Path:
    path = tmp_path / "config.json"
    payload = blob_run_config(tmp_path / "run", save_params=False).model_dump(mode="json", by_alias=True)
    path.write_text(json.dumps({**payload, **overrides}))
    return path


def _stdout_json(capsys: pytest.CaptureFixture[str]) -> dict[str, Any]:
    return json.loads(capsys.readouterr().out)


class TestMain:
    def test_run_prints_metrics(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert cli.main(["run", "--config", str(_config_file(tmp_path))]) == 0
        output = _stdout_json(capsys)
        assert output["run_dir"] == str(tmp_path / "run")
        assert "acc" in output["metrics"]

    def test_invalid_config_exits_2(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert cli.main(["run", "--config", str(_config_file(tmp_path, epochs=3))]) == 2
        output = _stdout_json(capsys)
        assert output["error"] == "config_invalid"
        assert output["exit_code"] == 2

    def test_compare_needs_two_runs(self, tmp_path: Path) -> None:
        assert cli.main(["compare", str(tmp_path)]) == 2

    def test_plot_data_without_run_exits_4(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert cli.main(["plot-data", str(tmp_path / "absent")]) == 4
        assert _stdout_json(capsys)["error"] == "artifact_io"

    def test_missing_dataset_exits_4(self, tmp_path: Path) -> None:
        config = _config_file(tmp_path, dataset={"kind": "mnist_idx", "train_images": str(tmp_path / "absent")})
        assert cli.main(["run", "--config", str(config)]) == 4

    def test_baseline_bk(self, tmp_path: Path, capsys: pytest.CaptureFixture[str]) -> None:
        assert cli.main(["baseline-bk", "--config", str(_config_file(tmp_path))]) == 0
        output = _stdout_json(capsys)
        assert output["num_seeds"] == 2
        assert len(output["b"]) == 2

    def test_unexpected_failure_exits_3(
        self, tmp_path: Path, capsys: pytest.CaptureFixture[str], monkeypatch: pytest.MonkeyPatch
    ) -> None:
        def explode(args: argparse.Namespace, container: ApplicationContainer) -> int:
            raise RuntimeError("boom")

        monkeypatch.setitem(cli.COMMANDS, "plot-data", explode)
        assert cli.main(["plot-data", str(tmp_path)]) == 3
        assert _stdout_json(capsys) == {"error": "unhandled_exception", "message": "boom", "exit_code": 3}
