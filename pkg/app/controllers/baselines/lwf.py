import logging

import torch

from app.controllers.baselines.finetune import NEW_TASK_PHASE
from app.controllers.learners.base import ContinualLearner
from app.controllers.learners.state import NflState
from app.controllers.losses import cross_entropy, kd_loss
from app.models.run_config import MethodName
from app.models.stream import TaskData

logger = logging.getLogger(__name__)


class LwfController(ContinualLearner):
    """Learning without Forgetting: one phase of lambda * KD toward recorded old-head logits plus CE."""

    method = MethodName.LWF

    def learn_task(self, state: NflState, task: TaskData) -> NflState:
        model = state.model
        old_heads = range(state.task_count)
        with torch.no_grad():
            features = model.features(task.train.inputs)
            H = torch.cat([model.head_logits(features, head_id) for head_id in old_heads], dim=1)

        head_id = self._add_task_head(state, task)
        model.set_trainable([True] * len(model.blocks()))

        def loss_fn(inputs: torch.Tensor, labels: torch.Tensor, H_batch: torch.Tensor) -> torch.Tensor:
            batch_features = model.features(inputs)
            old_logits = torch.cat([model.head_logits(batch_features, old) for old in old_heads], dim=1)
            new_logits = model.head_logits(batch_features, head_id)
            return self._hp.lambda_ * kd_loss(H_batch, old_logits, self._hp.p) + cross_entropy(new_logits, labels)

        self._fit(state, task, NEW_TASK_PHASE, (task.train.inputs, task.train.labels, H), loss_fn)
        self._finish_task(state)
        return state
