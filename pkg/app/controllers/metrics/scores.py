"""
Continual-learning metrics over an accuracy matrix.

A[i, j] is the test accuracy on task j after training through task i, as a fraction.
Indices are 0-based here: row T-1 is the final stage, A[k-1, k] is the forward-transfer
preview of task k taken before it was learned. Entries never measured are NaN.
"""

import logging
from collections.abc import Sequence

import numpy as np

from app.exceptions import InvalidDataError
from app.models.reports import PS_NO_FORGETTING, MetricsReport

logger = logging.getLogger(__name__)

AccuracyMatrix = np.ndarray


def as_matrix(values: Sequence[Sequence[float | None]] | np.ndarray) -> AccuracyMatrix:
    matrix = np.array(
        [[np.nan if value is None else float(value) for value in row] for row in values], dtype=np.float64
    )
    if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1] or matrix.shape[0] == 0:
        raise InvalidDataError(f"Accuracy matrix must be square and nonempty, got shape {matrix.shape}")
    measured = matrix[~np.isnan(matrix)]
    if ((measured < 0) | (measured > 1)).any():
        raise InvalidDataError("Accuracies must lie in [0, 1]")
    return matrix


def _require(values: np.ndarray, what: str) -> np.ndarray:
    if np.isnan(values).any():
        raise InvalidDataError(f"Accuracy matrix is missing {what}")
    return values


def _require_two_tasks(matrix: AccuracyMatrix) -> int:
    size = matrix.shape[0]
    if size < 2:
        raise InvalidDataError("This metric needs at least two tasks")
    return size


def avg_accuracy(matrix: AccuracyMatrix) -> float:
    return float(_require(matrix[-1], "entries in the last row").mean())


def fwt(matrix: AccuracyMatrix, baseline: Sequence[float]) -> float:
    size = _require_two_tasks(matrix)
    if len(baseline) != size:
        raise InvalidDataError(f"Baseline vector has {len(baseline)} entries for {size} tasks")
    previews = _require(np.array([matrix[k - 1, k] for k in range(1, size)]), "forward-transfer previews")
    return float((previews - np.asarray(baseline[1:], dtype=np.float64)).mean())


def bwt(matrix: AccuracyMatrix) -> float:
    size = _require_two_tasks(matrix)
    final = _require(matrix[-1, : size - 1], "entries in the last row")
    diagonal = _require(np.diag(matrix)[: size - 1], "diagonal entries")
    return float((final - diagonal).mean())


def avg_forgetting(matrix: AccuracyMatrix) -> float:
    """Mean over earlier tasks of (best accuracy before the last task) - final accuracy.

    For task j (0-based) the best is taken over rows j..T-2, i.e. from the row where the task
    was learned up to, but excluding, the final row. AF is negative when a task ends above
    every earlier score.
    """
    size = _require_two_tasks(matrix)
    final = _require(matrix[-1, : size - 1], "entries in the last row")
    drops = []
    for j in range(size - 1):
        history = _require(matrix[j : size - 1, j], f"column {j} from its diagonal to the second-to-last row")
        drops.append(history.max() - final[j])
    return float(np.mean(drops))


def intransigence(matrix: AccuracyMatrix, a_star: float) -> float:
    if not 0.0 <= a_star <= 1.0:
        raise InvalidDataError(f"a_star must lie in [0, 1], got {a_star}")
    return float(a_star - _require(matrix[-1, -1:], "the final diagonal entry")[0])


def plasticity_stability(matrix: AccuracyMatrix, eps: float = 1e-8) -> float | str:
    """Mean new-task gain over the magnitude of accumulated forgetting; a sentinel when nothing was forgotten."""
    size = _require_two_tasks(matrix)
    gains = [matrix[k, k] - matrix[k - 1, k] for k in range(1, size)]
    forgetting = [matrix[-1, k] - matrix[k, k] for k in range(size - 1)]
    _require(np.array(gains + forgetting), "diagonal, preview or last-row entries")
    denominator = abs(sum(forgetting))
    if denominator < eps:
        return PS_NO_FORGETTING
    return float(sum(gains) / denominator / (size - 1))


def has_previews(matrix: AccuracyMatrix) -> bool:
    return all(not np.isnan(matrix[k - 1, k]) for k in range(1, matrix.shape[0]))


def compute_report(
    matrix: AccuracyMatrix,
    baseline: Sequence[float] | None = None,
    a_star: float | None = None,
    eps: float = 1e-8,
) -> MetricsReport:
    """Every metric the inputs allow; the rest stay None."""
    report = MetricsReport(
        acc=avg_accuracy(matrix), b=list(baseline) if baseline is not None else None, a_star=a_star
    )
    if a_star is not None:
        report.intransigence = intransigence(matrix, a_star)
    if matrix.shape[0] < 2:
        return report
    report.bwt = bwt(matrix)
    report.af = avg_forgetting(matrix)
    if has_previews(matrix):
        report.ps = plasticity_stability(matrix, eps)
        if baseline is not None:
            report.fwt = fwt(matrix, baseline)
    return report
