"""
Five-step learning of one new task on top of a model trained on all earlier tasks.

    1. record H: the old heads' logits on the new inputs
    2. train the new head alone (trunk and old heads frozen)
    3. retrain trunk and old heads with KD toward H plus lambda * CE (new head frozen)
    4. fine-tune trunk and new head with KD toward H plus omega * CE (old heads frozen)
    5. recompute H~ through the stored heads, then train everything with the dual KD objective

Only the current task's data is ever passed in.
"""

import logging

import torch
import torch.nn.functional as F

from app.controllers.learners.base import ContinualLearner
from app.controllers.learners.state import NflState
from app.controllers.losses import LogitRecord, cross_entropy, loss_L3, loss_L4, loss_L5
from app.controllers.network.model import derive_seed
from app.controllers.network.snapshot import ParameterSnapshot
from app.exceptions import InvalidDataError, ShapeMismatchError
from app.models.hyperparams import Hyperparams, NflOptions, OptimizerSettings
from app.models.run_config import MethodName
from app.models.stream import TaskData

logger = logging.getLogger(__name__)


def apply_head_snapshot(features: torch.Tensor, saved: ParameterSnapshot) -> torch.Tensor:
    """Logits of a stored linear head; the stored tensors never receive gradients."""
    ((weight, bias),) = saved.blocks
    return F.linear(features, weight, bias)


class NflController(ContinualLearner):
    method = MethodName.NFL

    def __init__(
        self, hyperparams: Hyperparams, optimizer: OptimizerSettings, options: NflOptions, seed: int
    ) -> None:
        super().__init__(hyperparams, optimizer, seed)
        self._options = options

    @property
    def options(self) -> NflOptions:
        return self._options

    def record_soft_targets(self, state: NflState, inputs: torch.Tensor) -> LogitRecord:
        """Concatenated logits of the first `task_count` heads, without touching any parameter."""
        if state.task_count == 0:
            raise InvalidDataError("No trained task to record soft targets from")
        if inputs.shape[0] == 0:
            raise InvalidDataError("Cannot record soft targets on an empty input set")
        with torch.no_grad():
            features = state.model.features(inputs)
            H = self._old_logits(state, features)
        return LogitRecord(H=H)

    def step2_train_new_head(self, state: NflState, task: TaskData) -> None:
        new_head = self._require_new_head(state)
        model = state.model
        model.set_trainable([block_id == new_head for block_id in range(len(model.blocks()))])

        def loss_fn(inputs: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
            return cross_entropy(model.head_logits(model.features(inputs), new_head - 1), labels)

        self._fit(state, task, "step2", (task.train.inputs, task.train.labels), loss_fn)

    def step3_retrain_shared(self, state: NflState, task: TaskData, record: LogitRecord) -> None:
        new_head = self._require_new_head(state)
        model = state.model
        self._check_record(state, record, len(task.train))
        if not self._options.step3_warm_start:
            for block_id in range(new_head):
                model.reinitialize_block(block_id, seed=derive_seed(self._seed, task.task_id, "reinit", block_id))
        model.set_trainable([block_id != new_head for block_id in range(len(model.blocks()))])

        def loss_fn(inputs: torch.Tensor, labels: torch.Tensor, H: torch.Tensor) -> torch.Tensor:
            features = model.features(inputs)
            return loss_L3(
                H, self._old_logits(state, features), labels, model.head_logits(features, new_head - 1), self._hp
            )

        self._fit(state, task, "step3", (task.train.inputs, task.train.labels, record.H), loss_fn)

    def step4_finetune(self, state: NflState, task: TaskData, record: LogitRecord) -> None:
        new_head = self._require_new_head(state)
        model = state.model
        self._check_record(state, record, len(task.train))
        model.set_trainable([block_id in (0, new_head) for block_id in range(len(model.blocks()))])

        def loss_fn(inputs: torch.Tensor, labels: torch.Tensor, H: torch.Tensor) -> torch.Tensor:
            features = model.features(inputs)
            return loss_L4(
                H, self._old_logits(state, features), labels, model.head_logits(features, new_head - 1), self._hp
            )

        self._fit(state, task, "step4", (task.train.inputs, task.train.labels, record.H), loss_fn)

    def recompute_logits(self, state: NflState, inputs: torch.Tensor) -> torch.Tensor:
        """H~: the current trunk composed with every old head as stored at the end of its own task."""
        if len(state.frozen_head_snapshots) < state.task_count:
            raise InvalidDataError(
                f"Only {len(state.frozen_head_snapshots)} head snapshots stored for {state.task_count} tasks"
            )
        with torch.no_grad():
            return self._stored_logits(state, state.model.features(inputs))

    def step5_joint_distill(self, state: NflState, task: TaskData, record: LogitRecord) -> None:
        new_head = self._require_new_head(state)
        model = state.model
        self._check_record(state, record, len(task.train))
        if record.H_tilde is None:
            raise InvalidDataError("Step 5 needs H_tilde; call recompute_logits first")
        model.set_trainable([True] * len(model.blocks()))

        def loss_fn(
            inputs: torch.Tensor, labels: torch.Tensor, H: torch.Tensor, H_tilde: torch.Tensor
        ) -> torch.Tensor:
            features = model.features(inputs)
            return loss_L5(
                H,
                self._stored_logits(state, features),
                H_tilde,
                self._old_logits(state, features),
                labels,
                model.head_logits(features, new_head - 1),
                self._hp,
            )

        self._fit(state, task, "step5", (task.train.inputs, task.train.labels, record.H, record.H_tilde), loss_fn)
        self._finish_task(state)

    def learn_task(self, state: NflState, task: TaskData) -> NflState:
        record = self.record_soft_targets(state, task.train.inputs)
        self._add_task_head(state, task)
        self.step2_train_new_head(state, task)
        self.step3_retrain_shared(state, task, record)
        self.step4_finetune(state, task, record)
        record.H_tilde = self.recompute_logits(state, task.train.inputs)
        self.step5_joint_distill(state, task, record)
        logger.info(f"nfl: learned task {task.task_id}; model now has {state.model.head_count} heads")
        return state

    @staticmethod
    def _old_logits(state: NflState, features: torch.Tensor) -> torch.Tensor:
        return torch.cat([state.model.head_logits(features, head_id) for head_id in range(state.task_count)], dim=1)

    @staticmethod
    def _stored_logits(state: NflState, features: torch.Tensor) -> torch.Tensor:
        saved = state.frozen_head_snapshots[: state.task_count]
        return torch.cat([apply_head_snapshot(features, head) for head in saved], dim=1)

    @staticmethod
    def _require_new_head(state: NflState) -> int:
        """Block id of the head being learned; it must exist and be the only head beyond task_count."""
        if state.model.head_count != state.task_count + 1:
            raise InvalidDataError(
                f"Expected {state.task_count + 1} heads (one new), model has {state.model.head_count}"
            )
        return state.task_count + 1

    @staticmethod
    def _check_record(state: NflState, record: LogitRecord, num_samples: int) -> None:
        expected = (num_samples, state.old_class_count)
        if tuple(record.H.shape) != expected:
            raise ShapeMismatchError(f"H has shape {tuple(record.H.shape)}, expected {expected}")
