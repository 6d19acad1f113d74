import json
from pathlib import Path

import pytest

from app.controllers.harness.compare import COLUMNS, ComparisonBuilder
from app.controllers.harness.plot_data import ACC_CURVE_FILE, PlotDataBuilder
from app.controllers.harness.runner import ACC_MATRIX_FILE, METRICS_FILE, RUN_META_FILE
from app.exceptions import ArtifactIOError, ConfigError, DataFormatError
from app.models.reports import PS_NO_FORGETTING, MetricsReport


def _fake_run(run_dir: Path, method: str, seed: int, acc: float, ps: float | str | None = 2.0) -> Path:
    run_dir.mkdir(parents=True)
    report = MetricsReport(acc=acc, fwt=0.1, bwt=-0.2, af=0.2, ps=ps)
    (run_dir / METRICS_FILE).write_text(json.dumps(report.model_dump()))
    (run_dir / RUN_META_FILE).write_text(json.dumps({"config": {"method": method, "seed": seed}}))
    return run_dir


class TestComparisonBuilder:
    def test_self_comparison_has_zero_deltas(self, tmp_path: Path) -> None:
        run = _fake_run(tmp_path / "nfl_0", "nfl", 0, acc=0.8)
        table = ComparisonBuilder().compare([run, run])
        for row in table.deltas:
            assert row.metrics["acc"] == 0.0
            assert row.metrics["bwt"] == 0.0
            assert row.metrics["intransigence"] is None

    def test_deltas_against_first_run(self, tmp_path: Path) -> None:
        first = _fake_run(tmp_path / "a", "finetune", 0, acc=0.5)
        second = _fake_run(tmp_path / "b", "nfl_plus", 0, acc=0.75)
        table = ComparisonBuilder().compare([first, second])
        assert table.deltas[1].metrics["acc"] == pytest.approx(0.25)

    def test_sentinel_ps_has_no_delta(self, tmp_path: Path) -> None:
        first = _fake_run(tmp_path / "a", "nfl", 0, acc=0.5)
        second = _fake_run(tmp_path / "b", "nfl", 1, acc=0.5, ps=PS_NO_FORGETTING)
        table = ComparisonBuilder().compare([first, second])
        assert table.rows[1].metrics["ps"] == PS_NO_FORGETTING
        assert table.deltas[1].metrics["ps"] is None

    def test_aggregates_per_method(self, tmp_path: Path) -> None:
        runs = [
            _fake_run(tmp_path / "a", "nfl", 0, acc=0.6),
            _fake_run(tmp_path / "b", "nfl", 1, acc=0.8),
            _fake_run(tmp_path / "c", "lwf", 0, acc=0.5),
        ]
        table = ComparisonBuilder().compare(runs)
        assert list(table.aggregates) == ["nfl", "lwf"]
        mean, std = table.aggregates["nfl"]["acc"] or (0.0, 0.0)
        assert mean == pytest.approx(0.7)
        assert std == pytest.approx(0.1)
        assert table.aggregates["lwf"]["intransigence"] is None

    def test_stable_columns(self, tmp_path: Path) -> None:
        runs = [_fake_run(tmp_path / "a", "nfl", 0, acc=0.6), _fake_run(tmp_path / "b", "lwf", 3, acc=0.5)]
        builder = ComparisonBuilder()
        table = builder.compare(runs)
        lines = builder.to_csv(table).splitlines()
        assert lines[0] == ",".join(COLUMNS) == "run,method,seed,acc,fwt,bwt,af,intransigence,ps"
        assert lines[2] == "b,lwf,3,0.500000,0.100000,-0.200000,0.200000,,2.000000"
        output = builder.write(table, tmp_path / "out" / "table.csv")
        assert output.read_text() == builder.to_csv(table)
        assert "deltas vs a" in builder.to_text(table)

    def test_needs_two_runs(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError):
            ComparisonBuilder().compare([_fake_run(tmp_path / "a", "nfl", 0, acc=0.6)])

    def test_missing_or_broken_artifacts(self, tmp_path: Path) -> None:
        run = _fake_run(tmp_path / "a", "nfl", 0, acc=0.6)
        with pytest.raises(ArtifactIOError):
            ComparisonBuilder().compare([run, tmp_path / "absent"])
        (run / RUN_META_FILE).write_text(json.dumps({"wall_time_s": 1.0}))
        with pytest.raises(DataFormatError):
            ComparisonBuilder().load_row(run)


class TestPlotDataBuilder:
    def test_mean_accuracy_per_stage(self, tmp_path: Path) -> None:
        (tmp_path / ACC_MATRIX_FILE).write_text("0.900000,0.100000\n0.800000,0.850000\n")
        builder = PlotDataBuilder()
        curve = builder.accuracy_curve(tmp_path)
        assert [seen for seen, _ in curve] == [1, 2]
        assert curve[0][1] == pytest.approx(0.9)
        assert curve[1][1] == pytest.approx(0.825)
        output = builder.write(tmp_path)
        assert output.name == ACC_CURVE_FILE
        assert output.read_text() == "tasks_seen,acc_so_far\n1,0.900000\n2,0.825000\n"

    def test_missing_matrix(self, tmp_path: Path) -> None:
        with pytest.raises(ArtifactIOError):
            PlotDataBuilder().accuracy_curve(tmp_path)
