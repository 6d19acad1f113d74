import logging
import math
from pathlib import Path

import numpy as np

from app.controllers.metrics.scores import AccuracyMatrix, as_matrix
from app.exceptions import ArtifactIOError, DataFormatError

logger = logging.getLogger(__name__)


def format_accuracy_rows(matrix: AccuracyMatrix) -> str:
    """One line per training stage, 6 fractional digits, empty cells for unmeasured entries."""
    lines = [",".join("" if math.isnan(value) else f"{value:.6f}" for value in row) for row in matrix]
    return "\n".join(lines) + "\n"


def write_accuracy_csv(matrix: AccuracyMatrix, path: Path) -> Path:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(format_accuracy_rows(matrix), encoding="ascii")
    except OSError as exc:
        raise ArtifactIOError(f"Could not write accuracy matrix to {path}: {exc}") from exc
    return path


def read_accuracy_csv(path: Path) -> AccuracyMatrix:
    try:
        text = path.read_text(encoding="ascii")
    except OSError as exc:
        raise ArtifactIOError(f"Could not read accuracy matrix {path}: {exc}", path=str(path)) from exc
    try:
        rows = [[float(cell) if cell else None for cell in line.split(",")] for line in text.splitlines() if line]
    except ValueError as exc:
        raise DataFormatError(f"{path} is not a numeric accuracy matrix: {exc}", path=str(path)) from exc
    if not rows or any(len(row) != len(rows) for row in rows):
        raise DataFormatError(f"{path} does not hold a square accuracy matrix", path=str(path))
    return as_matrix(rows)


def empty_matrix(size: int) -> AccuracyMatrix:
    return np.full((size, size), np.nan, dtype=np.float64)
