import logging

import torch

from app.controllers.learners.base import ContinualLearner
from app.controllers.learners.state import NflState
from app.controllers.losses import cross_entropy
from app.models.run_config import MethodName
from app.models.stream import TaskData

logger = logging.getLogger(__name__)

# Shared with LwF so the two methods draw identical minibatch orders.
NEW_TASK_PHASE = "new_task"


class FinetuneController(ContinualLearner):
    """Lower bound: plain cross-entropy on each new task, old heads simply left out of the loss."""

    method = MethodName.FINETUNE

    def learn_task(self, state: NflState, task: TaskData) -> NflState:
        head_id = self._add_task_head(state, task)
        model = state.model
        model.set_trainable([block_id in (0, head_id + 1) for block_id in range(len(model.blocks()))])

        def loss_fn(inputs: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
            return cross_entropy(model.head_logits(model.features(inputs), head_id), labels)

        self._fit(state, task, NEW_TASK_PHASE, (task.train.inputs, task.train.labels), loss_fn)
        self._finish_task(state)
        return state
