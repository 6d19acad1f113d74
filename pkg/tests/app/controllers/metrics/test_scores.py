import math

import numpy as np
import pytest

from app.controllers.metrics.scores import (
    as_matrix,
    avg_accuracy,
    avg_forgetting,
    bwt,
    compute_report,
    fwt,
    has_previews,
    intransigence,
    plasticity_stability,
)
from app.exceptions import InvalidDataError
from app.models.reports import PS_NO_FORGETTING

EXAMPLE = [[0.9, 0.1], [0.8, 0.85]]


class _Oracle:
    """Straight transcription of the defining sums with 1-based task indices."""

    def __init__(self, matrix: np.ndarray) -> None:
        self.T = matrix.shape[0]
        self.A = {(i + 1, j + 1): float(matrix[i, j]) for i in range(self.T) for j in range(self.T)}

    def acc(self) -> float:
        total = 0.0
        for k in range(1, self.T + 1):
            total += self.A[self.T, k]
        return total / self.T

    def fwt(self, b: list[float]) -> float:
        total = 0.0
        for k in range(2, self.T + 1):
            total += self.A[k - 1, k] - b[k - 1]
        return total / (self.T - 1)

    def bwt(self) -> float:
        total = 0.0
        for k in range(1, self.T):
            total += self.A[self.T, k] - self.A[k, k]
        return total / (self.T - 1)

    def af(self) -> float:
        total = 0.0
        for j in range(1, self.T):
            best = max(self.A[i, j] for i in range(j, self.T))
            total += best - self.A[self.T, j]
        return total / (self.T - 1)

    def intransigence(self, a_star: float) -> float:
        return a_star - self.A[self.T, self.T]

    def ps(self, eps: float) -> float | str:
        gains = 0.0
        for k in range(2, self.T + 1):
            gains += self.A[k, k] - self.A[k - 1, k]
        forgetting = 0.0
        for k in range(1, self.T):
            forgetting += self.A[self.T, k] - self.A[k, k]
        if abs(forgetting) < eps:
            return PS_NO_FORGETTING
        return gains / abs(forgetting) / (self.T - 1)


def _close(left: float | str | None, right: float | str) -> bool:
    if isinstance(left, str) or isinstance(right, str):
        return left == right
    assert left is not None
    return math.isclose(left, right, rel_tol=1e-12, abs_tol=1e-12)


class TestOracle:
    def test_random_matrices(self) -> None:
        rng = np.random.default_rng(20)
        for _ in range(1000):
            size = int(rng.integers(2, 9))
            matrix = as_matrix(rng.uniform(size=(size, size)))
            baseline = rng.uniform(size=size).tolist()
            a_star = float(rng.uniform())
            oracle = _Oracle(matrix)
            report = compute_report(matrix, baseline=baseline, a_star=a_star)
            assert _close(report.acc, oracle.acc())
            assert _close(report.fwt, oracle.fwt(baseline))
            assert _close(report.bwt, oracle.bwt())
            assert _close(report.af, oracle.af())
            assert _close(report.intransigence, oracle.intransigence(a_star))
            assert _close(report.ps, oracle.ps(1e-8))


class TestExamples:
    def test_two_task_example(self) -> None:
        matrix = as_matrix(EXAMPLE)
        assert avg_accuracy(matrix) == pytest.approx(0.825)
        assert fwt(matrix, [0.5, 0.5]) == pytest.approx(-0.4)
        assert bwt(matrix) == pytest.approx(-0.1)
        assert avg_forgetting(matrix) == pytest.approx(0.1)
        assert intransigence(matrix, 0.9) == pytest.approx(0.05)
        assert plasticity_stability(matrix) == pytest.approx(7.5)

    def test_no_forgetting(self) -> None:
        matrix = as_matrix([[0.9, 0.2, 0.1], [0.9, 0.8, 0.3], [0.9, 0.8, 0.7]])
        assert bwt(matrix) == 0.0
        assert avg_forgetting(matrix) == 0.0
        assert plasticity_stability(matrix) == PS_NO_FORGETTING

    def test_forgetting_ignores_the_final_row_in_the_best_score(self) -> None:
        assert avg_forgetting(as_matrix([[0.5, 0.1], [0.9, 0.8]])) == pytest.approx(-0.4)

    def test_forgetting_takes_best_over_intermediate_rows(self) -> None:
        matrix = as_matrix([[0.6, 0.1, 0.1], [0.9, 0.7, 0.1], [0.4, 0.8, 0.9]])
        assert avg_forgetting(matrix) == pytest.approx(((0.9 - 0.4) + (0.7 - 0.8)) / 2)

    def test_improvement_gives_positive_bwt(self) -> None:
        assert bwt(as_matrix([[0.6, None], [0.7, 0.9]])) == pytest.approx(0.1)

    def test_negative_intransigence_when_beating_joint(self) -> None:
        assert intransigence(as_matrix(EXAMPLE), 0.8) == pytest.approx(-0.05)

    def test_previews_match_baseline(self) -> None:
        assert fwt(as_matrix(EXAMPLE), [0.3, 0.1]) == 0.0


class TestValidation:
    def test_square_and_in_range(self) -> None:
        with pytest.raises(InvalidDataError):
            as_matrix([[0.5, 0.5]])
        with pytest.raises(InvalidDataError):
            as_matrix([[1.5]])
        with pytest.raises(InvalidDataError):
            as_matrix([])

    def test_two_tasks_required(self) -> None:
        with pytest.raises(InvalidDataError):
            bwt(as_matrix([[0.9]]))

    def test_missing_entries(self) -> None:
        matrix = as_matrix([[0.9, None], [0.8, 0.85]])
        assert not has_previews(matrix)
        with pytest.raises(InvalidDataError):
            fwt(matrix, [0.5, 0.5])
        with pytest.raises(InvalidDataError):
            avg_accuracy(as_matrix([[0.9, None], [0.8, None]]))

    def test_baseline_length(self) -> None:
        with pytest.raises(InvalidDataError):
            fwt(as_matrix(EXAMPLE), [0.5])

    def test_a_star_range(self) -> None:
        with pytest.raises(InvalidDataError):
            intransigence(as_matrix(EXAMPLE), 1.2)


class TestComputeReport:
    def test_single_task_reports_accuracy_only(self) -> None:
        report = compute_report(as_matrix([[0.7]]))
        assert report.acc == pytest.approx(0.7)
        assert (report.bwt, report.af, report.ps, report.fwt) == (None, None, None, None)

    def test_without_previews(self) -> None:
        report = compute_report(as_matrix([[0.9, None], [0.8, 0.85]]), baseline=[0.5, 0.5], a_star=0.9)
        assert report.bwt == pytest.approx(-0.1)
        assert report.fwt is None
        assert report.ps is None
        assert report.intransigence == pytest.approx(0.05)
        assert report.b == [0.5, 0.5]
        assert report.a_star == 0.9
