import logging
from abc import ABC, abstractmethod
from collections.abc import Callable

import torch

from app.controllers.losses import cross_entropy
from app.controllers.network.model import MultiHeadModel, build_model, derive_seed
from app.controllers.network.snapshot import SnapshotTag, snapshot_module
from app.controllers.network.training import fit
from app.controllers.learners.state import NflState
from app.exceptions import InvalidDataError
from app.models.hyperparams import Hyperparams, OptimizerSettings
from app.models.network import ModelSpec
from app.models.reports import TrainingTrace
from app.models.run_config import MethodName
from app.models.stream import TaskData

logger = logging.getLogger(__name__)


class ContinualLearner(ABC):
    """Shared plumbing for every exemplar-free method.

    A learner only ever receives the current task's `TaskData`; nothing here keeps a
    reference to earlier tasks' samples.
    """

    method: MethodName

    def __init__(self, hyperparams: Hyperparams, optimizer: OptimizerSettings, seed: int) -> None:
        self._hp = hyperparams
        self._optimizer = optimizer
        self._seed = seed

    @property
    def hyperparams(self) -> Hyperparams:
        return self._hp

    def seed_for(self, task_id: int, phase: str) -> int:
        return derive_seed(self._seed, task_id, phase)

    def head_seed(self, task_id: int) -> int:
        """Seed of task `task_id`'s head; FWT previews reuse it so the preview head matches."""
        return self.seed_for(task_id, "head")

    def new_model(self, spec: ModelSpec) -> MultiHeadModel:
        return build_model(spec, seed=derive_seed(self._seed, "model"))

    def train_first_task(self, spec: ModelSpec, task: TaskData) -> NflState:
        """Plain cross-entropy training of a fresh single-head model on task 0."""
        if spec.head_dims != [task.num_classes]:
            raise InvalidDataError(
                f"First-task model needs exactly one head of {task.num_classes} classes, got {spec.head_dims}"
            )
        model = self.new_model(spec)
        state = NflState(model=model)
        model.set_trainable([True, True])

        def loss_fn(inputs: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
            return cross_entropy(model.head_logits(model.features(inputs), 0), labels)

        self._fit(state, task, "supervised", (task.train.inputs, task.train.labels), loss_fn)
        self._finish_task(state)
        return state

    @abstractmethod
    def learn_task(self, state: NflState, task: TaskData) -> NflState: ...

    def _fit(
        self,
        state: NflState,
        task: TaskData,
        phase: str,
        tensors: tuple[torch.Tensor, ...],
        loss_fn: Callable[..., torch.Tensor],
        extra_params: list[torch.Tensor] | None = None,
        epochs: int | None = None,
        params: list[torch.Tensor] | None = None,
    ) -> TrainingTrace:
        """Train `params` (default: the model's trainable blocks plus `extra_params`) and keep the trace."""
        if params is None:
            params = [*state.model.trainable_parameters(), *(extra_params or [])]
        trace = fit(
            params,
            tensors,
            loss_fn,
            self._optimizer,
            seed=self.seed_for(task.task_id, phase),
            phase=f"{self.method.value}:{phase}",
            task_id=task.task_id,
            epochs=epochs,
        )
        state.traces.append(trace)
        return trace

    def _add_task_head(self, state: NflState, task: TaskData) -> int:
        if state.model.head_count != state.task_count:
            raise InvalidDataError(
                f"Model has {state.model.head_count} heads but {state.task_count} tasks were learned"
            )
        return state.model.add_head(task.num_classes, seed=self.head_seed(task.task_id))

    @staticmethod
    def _finish_task(state: NflState) -> None:
        """Store the newest head as it is at the end of its own task and count the task."""
        head = state.model.heads[state.task_count]
        state.frozen_head_snapshots.append(snapshot_module(head, SnapshotTag.TRAINED))
        state.task_count += 1
        state.model.set_trainable([True] * len(state.model.blocks()))
