"""
Joint-training upper bound. This is the only code path that sees more than one task's
training data at once; it gets them from `StreamCursor.union_train`.
"""

import logging

import torch

from app.controllers.learners.base import ContinualLearner
from app.controllers.learners.state import NflState
from app.controllers.losses import cross_entropy
from app.controllers.network.snapshot import SnapshotTag, snapshot_module
from app.exceptions import InvalidDataError
from app.models.network import ModelSpec
from app.models.run_config import MethodName
from app.models.stream import TaskData

logger = logging.getLogger(__name__)


class JointTrainer(ContinualLearner):
    method = MethodName.JOINT

    def learn_task(self, state: NflState, task: TaskData) -> NflState:
        raise InvalidDataError("Joint training is not incremental; use joint_train on the union of tasks")

    def joint_train(self, spec: ModelSpec, tasks: list[TaskData]) -> NflState:
        """Train a fresh multi-head model on tasks 0..k together.

        Each sample is scored by its own task's head, so the objective is the sample-weighted
        average of per-task cross-entropies. With a single task this is exactly
        `train_first_task`.
        """
        if not tasks:
            raise InvalidDataError("Joint training needs at least one task")
        model = self.new_model(spec.model_copy(update={"head_dims": [task.num_classes for task in tasks]}))
        state = NflState(model=model)
        model.set_trainable([True] * len(model.blocks()))

        inputs = torch.cat([task.train.inputs for task in tasks])
        labels = torch.cat([task.train.labels for task in tasks])
        task_ids = torch.cat(
            [torch.full((len(task.train),), index, dtype=torch.long) for index, task in enumerate(tasks)]
        )

        def loss_fn(batch_inputs: torch.Tensor, batch_labels: torch.Tensor, batch_tasks: torch.Tensor) -> torch.Tensor:
            features = model.features(batch_inputs)
            total = torch.zeros((), dtype=features.dtype)
            for head_id in torch.unique(batch_tasks).tolist():
                mask = batch_tasks == head_id
                weight = float(mask.sum()) / batch_tasks.shape[0]
                total = total + weight * cross_entropy(model.head_logits(features[mask], head_id), batch_labels[mask])
            return total

        last = tasks[-1]
        self._fit(state, last, "supervised", (inputs, labels, task_ids), loss_fn)
        state.frozen_head_snapshots = [snapshot_module(head, SnapshotTag.TRAINED) for head in model.heads]
        state.task_count = len(tasks)
        logger.info(f"joint: trained on {len(tasks)} task(s), {inputs.shape[0]} samples")
        return state
