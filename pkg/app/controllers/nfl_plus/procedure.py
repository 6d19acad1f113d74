"""
NFL+: the NFL steps plus feature preservation through an under-complete autoencoder,
bias-corrected soft targets, and a final objective with encoder-drift and bias terms.

The autoencoder is fitted at the end of every task on that task's trunk features; the
next task uses its encoder both for the drift term and as the base of the bias corrector.
"""

import logging
from dataclasses import replace

import torch

from app.controllers.learners.state import NflState
from app.controllers.losses import ae_objective, bias_reg, kd_loss, loss_L5_plus
from app.controllers.network.model import derive_seed, make_generator
from app.controllers.nfl.procedure import NflController, apply_head_snapshot
from app.controllers.nfl_plus.autoencoder import AutoEncoder, BiasCorrector, adjust_logits, default_code_dim
from app.exceptions import InvalidDataError
from app.models.network import ModelSpec
from app.models.run_config import MethodName
from app.models.stream import LabeledSet, TaskData

logger = logging.getLogger(__name__)


class NflPlusController(NflController):
    method = MethodName.NFL_PLUS

    def train_first_task(self, spec: ModelSpec, task: TaskData) -> NflState:
        state = super().train_first_task(spec, task)
        state.autoencoder = self.train_autoencoder(state, task)
        return state

    def code_dim_for(self, state: NflState) -> int:
        if self._options.code_dim is not None:
            return self._options.code_dim
        return default_code_dim(state.model.feature_dim, state.old_class_count)

    def train_autoencoder(self, state: NflState, task: TaskData) -> AutoEncoder:
        """Fit a fresh autoencoder on the finished task's trunk features through its stored head."""
        if state.task_count == 0 or len(state.frozen_head_snapshots) < state.task_count:
            raise InvalidDataError("The autoencoder is trained only after a task has been completed")
        head = state.frozen_head_snapshots[state.task_count - 1]
        with torch.no_grad():
            features = state.model.features(task.train.inputs)

        autoencoder = AutoEncoder(
            state.model.feature_dim,
            self.code_dim_for(state),
            seed=derive_seed(self._seed, task.task_id, "autoencoder"),
        )

        def loss_fn(batch_features: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
            reconstructed = autoencoder(batch_features)
            return ae_objective(
                batch_features, reconstructed, apply_head_snapshot(reconstructed, head), labels, self._hp.Omega_
            )

        self._fit(
            state,
            task,
            "autoencoder",
            (features, task.train.labels),
            loss_fn,
            epochs=self._options.ae_epochs,
            params=list(autoencoder.parameters()),
        )
        autoencoder.requires_grad_(False)
        return autoencoder

    def split_holdout(self, task: TaskData) -> tuple[LabeledSet, LabeledSet]:
        """Seeded (fit, holdout) split of the new task's training data."""
        size = len(task.train)
        holdout_size = max(1, round(self._options.holdout_fraction * size))
        if holdout_size >= size:
            raise InvalidDataError(f"Task {task.task_id} has too few samples ({size}) to hold out a slice")
        order = torch.randperm(size, generator=make_generator(self.seed_for(task.task_id, "holdout")))
        return task.train.subset(order[holdout_size:]), task.train.subset(order[:holdout_size])

    def fit_bias_correction(
        self,
        state: NflState,
        task: TaskData,
        autoencoder: AutoEncoder,
        reference_features: torch.Tensor,
        H: torch.Tensor,
        H_tilde: torch.Tensor,
    ) -> BiasCorrector:
        """Train only w_bias and b_bias on the holdout: tau * bias_reg + KD of Gamma * H toward H~."""
        if reference_features.shape[0] == 0:
            raise InvalidDataError("Bias correction needs a nonempty holdout set")
        corrector = BiasCorrector(autoencoder.encoder.weight, state.old_class_count)

        def loss_fn(features: torch.Tensor, H_batch: torch.Tensor, H_tilde_batch: torch.Tensor) -> torch.Tensor:
            gamma = corrector(features)
            return self._hp.tau * bias_reg(gamma) + kd_loss(H_tilde_batch, adjust_logits(gamma, H_batch), self._hp.p)

        self._fit(
            state,
            task,
            "bias",
            (reference_features, H, H_tilde),
            loss_fn,
            epochs=self._options.bias_epochs,
            params=list(corrector.parameters()),
        )
        return corrector

    def step6_joint_distill_plus(
        self,
        state: NflState,
        task: TaskData,
        H: torch.Tensor,
        H_tilde: torch.Tensor,
        reference_features: torch.Tensor,
        reference_codes: torch.Tensor,
        autoencoder: AutoEncoder,
        corrector: BiasCorrector,
    ) -> None:
        """Train trunk, all heads and the bias corrector with the extended dual-KD objective."""
        new_head = self._require_new_head(state)
        model = state.model
        model.set_trainable([True] * len(model.blocks()))

        def loss_fn(
            inputs: torch.Tensor,
            labels: torch.Tensor,
            H_batch: torch.Tensor,
            H_tilde_batch: torch.Tensor,
            features_ref: torch.Tensor,
            codes_ref: torch.Tensor,
        ) -> torch.Tensor:
            features = model.features(inputs)
            gamma = corrector(features_ref)
            return loss_L5_plus(
                adjust_logits(gamma, H_batch),
                self._stored_logits(state, features),
                H_tilde_batch,
                self._old_logits(state, features),
                labels,
                model.head_logits(features, new_head - 1),
                autoencoder.encode(features),
                codes_ref,
                gamma,
                self._hp,
            )

        self._fit(
            state,
            task,
            "step6",
            (task.train.inputs, task.train.labels, H, H_tilde, reference_features, reference_codes),
            loss_fn,
            extra_params=list(corrector.parameters()),
        )
        self._finish_task(state)

    def learn_task_plus(self, state: NflState, task: TaskData) -> NflState:
        autoencoder = state.autoencoder
        if autoencoder is None:
            raise InvalidDataError("NFL+ needs the autoencoder fitted at the end of the previous task")

        fit_part, holdout = self.split_holdout(task)
        fit_task = replace(task, train=fit_part)
        with torch.no_grad():
            reference_features = state.model.features(fit_part.inputs)
            holdout_features = state.model.features(holdout.inputs)
            reference_codes = autoencoder.encode(reference_features)

        record = self.record_soft_targets(state, fit_part.inputs)
        holdout_H = self.record_soft_targets(state, holdout.inputs).H

        self._add_task_head(state, task)
        self.step2_train_new_head(state, fit_task)
        self.step3_retrain_shared(state, fit_task, record)
        self.step4_finetune(state, fit_task, record)
        H_tilde = self.recompute_logits(state, fit_part.inputs)
        record.H_tilde = H_tilde
        holdout_H_tilde = self.recompute_logits(state, holdout.inputs)

        corrector = self.fit_bias_correction(state, task, autoencoder, holdout_features, holdout_H, holdout_H_tilde)
        self.step6_joint_distill_plus(
            state, fit_task, record.H, H_tilde, reference_features, reference_codes, autoencoder, corrector
        )
        corrector.requires_grad_(False)
        with torch.no_grad():
            gamma = corrector(reference_features)
            record.H_prime = adjust_logits(gamma, record.H)
        logger.info(f"nfl_plus: learned task {task.task_id}; mean bias multiplier {float(gamma.mean()):.4f}")

        state.bias_corrector = corrector
        state.autoencoder = self.train_autoencoder(state, task)
        return state

    def learn_task(self, state: NflState, task: TaskData) -> NflState:
        return self.learn_task_plus(state, task)
