import logging

import numpy as np
import torch

from app.controllers.network.model import derive_seed
from app.exceptions import ConfigError, InvalidDataError
from app.models.stream import LabeledSet, LabelMap, ScenarioMode, TaskData, TaskStream

logger = logging.getLogger(__name__)


def split_classes(
    train: LabeledSet, test: LabeledSet, num_tasks: int, mode: ScenarioMode, seed: int
) -> TaskStream:
    """Partition the classes into `num_tasks` equal groups in seed-shuffled order.

    Samples keep their source train/test membership and file order; labels become
    head-local indices (position of the class within its group).
    """
    classes = np.unique(train.labels.numpy())
    if num_tasks < 1 or len(classes) % num_tasks:
        raise ConfigError(f"{len(classes)} classes cannot be split evenly into {num_tasks} tasks")
    unknown = set(np.unique(test.labels.numpy()).tolist()) - set(classes.tolist())
    if unknown:
        raise InvalidDataError(f"Test labels {sorted(unknown)} never occur in the training split")

    order = np.random.default_rng(derive_seed(seed, "class_order")).permutation(classes)
    groups = np.split(order, num_tasks)

    tasks: list[TaskData] = []
    global_to_local: dict[int, tuple[int, int]] = {}
    for task_id, group in enumerate(groups):
        class_ids = tuple(int(label) for label in group)
        for local, label in enumerate(class_ids):
            global_to_local[label] = (task_id, local)
        tasks.append(
            TaskData(
                task_id=task_id,
                train=_select(train, class_ids),
                test=_select(test, class_ids),
                class_ids=class_ids,
            )
        )
        logger.debug(f"Task {task_id}: classes {class_ids}")

    return TaskStream(tasks=tuple(tasks), mode=mode, label_map=LabelMap(global_to_local=global_to_local))


def _select(data: LabeledSet, class_ids: tuple[int, ...]) -> LabeledSet:
    lookup = torch.full((int(data.labels.max()) + 1,), -1, dtype=torch.long)
    for local, label in enumerate(class_ids):
        if label < lookup.shape[0]:
            lookup[label] = local
    local_labels = lookup[data.labels]
    keep = local_labels >= 0
    return LabeledSet(inputs=data.inputs[keep], labels=local_labels[keep])
