from dataclasses import dataclass, field
from enum import StrEnum

import torch


class ScenarioMode(StrEnum):
    TASK_IL = "task_il"
    CLASS_IL = "class_il"


@dataclass(frozen=True)
class LabeledSet:
    """Flattened inputs (N x D, float64 in [0, 1] for image data) with integer labels (N)."""

    inputs: torch.Tensor
    labels: torch.Tensor

    def __len__(self) -> int:
        return int(self.labels.shape[0])

    @property
    def input_dim(self) -> int:
        return int(self.inputs.shape[1])

    def subset(self, index: torch.Tensor) -> "LabeledSet":
        return LabeledSet(inputs=self.inputs[index], labels=self.labels[index])


@dataclass(frozen=True)
class TaskData:
    """One task of a stream. Labels in train/test are head-local (0..len(class_ids)-1)."""

    task_id: int
    train: LabeledSet
    test: LabeledSet
    class_ids: tuple[int, ...]

    @property
    def num_classes(self) -> int:
        return len(self.class_ids)


@dataclass(frozen=True)
class LabelMap:
    global_to_local: dict[int, tuple[int, int]] = field(default_factory=dict)

    def local(self, global_label: int) -> tuple[int, int]:
        return self.global_to_local[global_label]


@dataclass(frozen=True)
class TaskStream:
    tasks: tuple[TaskData, ...]
    mode: ScenarioMode
    label_map: LabelMap

    def __len__(self) -> int:
        return len(self.tasks)

    @property
    def class_counts(self) -> list[int]:
        return [task.num_classes for task in self.tasks]

    def class_offset(self, task_id: int) -> int:
        """Column of the task's first class in the concatenated (Class-IL) logit vector."""
        return sum(self.class_counts[:task_id])
