from collections.abc import Sequence

import torch

from app.controllers.network.model import build_model, derive_seed
from app.exceptions import InvalidDataError
from app.models.network import ModelSpec
from app.models.stream import ScenarioMode, TaskData


def random_baseline_accuracy(
    spec: ModelSpec,
    task: TaskData,
    num_seeds: int,
    seed: int,
    mode: ScenarioMode = ScenarioMode.TASK_IL,
    earlier_class_counts: Sequence[int] = (),
) -> float:
    """b_k: mean test accuracy of freshly He-initialised models, scored under the run's scenario.

    Each model has one head per task up to and including `task`, like the model that previews
    it. Task-IL scores the task's own head. Class-IL takes the argmax over every head's logits
    against the task's global class indices.
    """
    if num_seeds < 1:
        raise InvalidDataError(f"num_seeds must be >= 1, got {num_seeds}")
    if len(task.test) == 0:
        raise InvalidDataError(f"Task {task.task_id} has an empty test set")
    head_dims = [*earlier_class_counts, task.num_classes]
    task_head = len(earlier_class_counts)
    total = 0.0
    for index in range(num_seeds):
        model = build_model(
            spec.model_copy(update={"head_dims": head_dims}),
            seed=derive_seed(seed, "baseline", task.task_id, index),
        )
        with torch.no_grad():
            if mode == ScenarioMode.TASK_IL:
                (logits,) = model(task.test.inputs, heads=[task_head])
                targets = task.test.labels
            else:
                logits = torch.cat(model(task.test.inputs), dim=1)
                targets = task.test.labels + sum(earlier_class_counts)
        total += float((logits.argmax(dim=1) == targets).to(torch.float64).mean())
    return total / num_seeds
