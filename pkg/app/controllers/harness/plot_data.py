import logging
from pathlib import Path

import numpy as np

from app.controllers.harness.runner import ACC_MATRIX_FILE
from app.controllers.metrics.accuracy_csv import read_accuracy_csv
from app.exceptions import ArtifactIOError

logger = logging.getLogger(__name__)

ACC_CURVE_FILE = "acc_curve.csv"


class PlotDataBuilder:
    def accuracy_curve(self, run_dir: Path) -> list[tuple[int, float]]:
        """(tasks seen, mean accuracy over the tasks seen so far) after every stage."""
        path = run_dir / ACC_MATRIX_FILE
        if not path.is_file():
            raise ArtifactIOError(f"No {ACC_MATRIX_FILE} in {run_dir}", path=str(path))
        matrix = read_accuracy_csv(path)
        return [(stage + 1, float(np.mean(matrix[stage, : stage + 1]))) for stage in range(matrix.shape[0])]

    def write(self, run_dir: Path) -> Path:
        output = run_dir / ACC_CURVE_FILE
        lines = ["tasks_seen,acc_so_far", *(f"{seen},{acc:.6f}" for seen, acc in self.accuracy_curve(run_dir))]
        try:
            output.write_text("\n".join(lines) + "\n", encoding="ascii")
        except OSError as exc:
            raise ArtifactIOError(f"Could not write {output}: {exc}") from exc
        logger.info(f"Accuracy curve written to {output}")
        return output
