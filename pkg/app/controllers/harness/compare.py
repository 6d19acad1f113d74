"""
Side-by-side comparison of finished runs.

Column order is fixed: run, method, seed, acc, fwt, bwt, af, intransigence, ps. Delta rows
are each run minus the first run; aggregate rows give mean and population std per method.
"""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from app.controllers.harness.runner import METRICS_FILE, RUN_META_FILE, read_metrics
from app.exceptions import ArtifactIOError, ConfigError, DataFormatError
from app.models.reports import MetricsReport

logger = logging.getLogger(__name__)

METRIC_COLUMNS = ("acc", "fwt", "bwt", "af", "intransigence", "ps")
COLUMNS = ("run", "method", "seed", *METRIC_COLUMNS)

Cell = float | str | None


@dataclass
class RunRow:
    run: str
    method: str
    seed: int
    metrics: dict[str, Cell]

    def cells(self) -> list[Cell]:
        return [self.run, self.method, self.seed, *(self.metrics[name] for name in METRIC_COLUMNS)]


@dataclass
class ComparisonTable:
    rows: list[RunRow] = field(default_factory=list)
    deltas: list[RunRow] = field(default_factory=list)
    aggregates: dict[str, dict[str, tuple[float, float] | None]] = field(default_factory=dict)


def _format(value: Cell | int) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return f"{value:.6f}"
    return str(value)


def _delta(left: Cell, right: Cell) -> Cell:
    if isinstance(left, float) and isinstance(right, float):
        return left - right
    return None


class ComparisonBuilder:
    def load_row(self, run_dir: Path) -> RunRow:
        if not (run_dir / METRICS_FILE).is_file() or not (run_dir / RUN_META_FILE).is_file():
            raise ArtifactIOError(f"{run_dir} is missing {METRICS_FILE} or {RUN_META_FILE}", path=str(run_dir))
        report: MetricsReport = read_metrics(run_dir)
        try:
            config = json.loads((run_dir / RUN_META_FILE).read_text(encoding="utf-8"))["config"]
            method, seed = str(config["method"]), int(config["seed"])
        except (ValueError, KeyError, TypeError) as exc:
            raise DataFormatError(f"{run_dir / RUN_META_FILE} has no usable config echo: {exc}") from exc
        metrics: dict[str, Cell] = {name: getattr(report, name) for name in METRIC_COLUMNS}
        return RunRow(run=run_dir.name, method=method, seed=seed, metrics=metrics)

    def compare(self, run_dirs: list[Path]) -> ComparisonTable:
        if len(run_dirs) < 2:
            raise ConfigError("compare needs at least two run directories")
        rows = [self.load_row(run_dir) for run_dir in run_dirs]
        reference = rows[0]
        deltas = [
            RunRow(
                run=row.run,
                method=row.method,
                seed=row.seed,
                metrics={name: _delta(row.metrics[name], reference.metrics[name]) for name in METRIC_COLUMNS},
            )
            for row in rows
        ]
        return ComparisonTable(rows=rows, deltas=deltas, aggregates=self._aggregate(rows))

    @staticmethod
    def _aggregate(rows: list[RunRow]) -> dict[str, dict[str, tuple[float, float] | None]]:
        aggregates: dict[str, dict[str, tuple[float, float] | None]] = {}
        for method in dict.fromkeys(row.method for row in rows):
            group = [row for row in rows if row.method == method]
            aggregates[method] = {}
            for name in METRIC_COLUMNS:
                values = [value for row in group if isinstance(value := row.metrics[name], float)]
                aggregates[method][name] = (float(np.mean(values)), float(np.std(values))) if values else None
        return aggregates

    def to_csv(self, table: ComparisonTable) -> str:
        lines = [",".join(COLUMNS)]
        lines += [",".join(_format(cell) for cell in row.cells()) for row in table.rows]
        return "\n".join(lines) + "\n"

    def to_text(self, table: ComparisonTable) -> str:
        def render(rows: list[list[str]]) -> list[str]:
            widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
            return ["  ".join(cell.ljust(width) for cell, width in zip(row, widths)).rstrip() for row in rows]

        header = list(COLUMNS)
        sections = ["runs", *render([header, *([_format(c) for c in row.cells()] for row in table.rows)])]
        sections += ["", f"deltas vs {table.rows[0].run}"]
        sections += render([header, *([_format(c) for c in row.cells()] for row in table.deltas)])
        sections += ["", "mean +/- std per method"]
        aggregate_rows = [["method", *METRIC_COLUMNS]]
        for method, stats in table.aggregates.items():
            cells = ["" if (s := stats[name]) is None else f"{s[0]:.6f} +/- {s[1]:.6f}" for name in METRIC_COLUMNS]
            aggregate_rows.append([method, *cells])
        sections += render(aggregate_rows)
        return "\n".join(sections) + "\n"

    def write(self, table: ComparisonTable, output: Path) -> Path:
        try:
            output.parent.mkdir(parents=True, exist_ok=True)
            output.write_text(self.to_csv(table), encoding="ascii")
        except OSError as exc:
            raise ArtifactIOError(f"Could not write comparison to {output}: {exc}") from exc
        logger.info(f"Comparison of {len(table.rows)} runs written to {output}")
        return output
