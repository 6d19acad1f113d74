"""
Task-IL and Class-IL evaluation of a multi-head model on a task stream.

Task-IL scores task j with head j alone. Class-IL scores the argmax of all heads' logits
concatenated in task order against the global index offset(j) + local label.
"""

import copy
import logging

import torch

from app.controllers.network.model import MultiHeadModel
from app.exceptions import InvalidDataError
from app.models.stream import ScenarioMode, TaskStream

logger = logging.getLogger(__name__)


def _accuracy(predictions: torch.Tensor, targets: torch.Tensor) -> float:
    if targets.numel() == 0:
        raise InvalidDataError("Cannot score an empty test set")
    return float((predictions == targets).to(torch.float64).mean())


class Evaluator:
    def task_accuracy(self, model: MultiHeadModel, stream: TaskStream, task_id: int, mode: ScenarioMode) -> float:
        task = stream.tasks[task_id]
        with torch.no_grad():
            if mode == ScenarioMode.TASK_IL:
                (logits,) = model(task.test.inputs, heads=[task_id])
                return _accuracy(logits.argmax(dim=1), task.test.labels)
            logits = torch.cat(model(task.test.inputs), dim=1)
            return _accuracy(logits.argmax(dim=1), task.test.labels + stream.class_offset(task_id))

    def evaluate(self, model: MultiHeadModel, stream: TaskStream, mode: ScenarioMode) -> list[float]:
        """Accuracy on every task the model has a head for."""
        if model.head_count == 0:
            raise InvalidDataError("Nothing to evaluate: the model has no heads")
        return [self.task_accuracy(model, stream, task_id, mode) for task_id in range(model.head_count)]

    def preview_next_task(
        self, model: MultiHeadModel, stream: TaskStream, mode: ScenarioMode, head_seed: int
    ) -> float:
        """Accuracy on the next task before learning it, via a throwaway copy with a fresh head."""
        next_task = model.head_count
        if next_task >= len(stream):
            raise InvalidDataError("No next task to preview")
        preview = copy.deepcopy(model)
        preview.add_head(stream.tasks[next_task].num_classes, seed=head_seed)
        return self.task_accuracy(preview, stream, next_task, mode)
