import logging
from collections.abc import Callable, Iterable

import torch
from torch.utils.data import BatchSampler, DataLoader, RandomSampler, TensorDataset

from app.controllers.network.model import make_generator
from app.controllers.network.optimizer import MomentumSGD
from app.exceptions import NumericalError
from app.models.hyperparams import OptimizerSettings
from app.models.reports import TrainingTrace

logger = logging.getLogger(__name__)

LossFn = Callable[..., torch.Tensor]


def fit(
    params: Iterable[torch.Tensor],
    tensors: tuple[torch.Tensor, ...],
    loss_fn: LossFn,
    settings: OptimizerSettings,
    seed: int,
    phase: str,
    task_id: int = 0,
    epochs: int | None = None,
) -> TrainingTrace:
    """Minibatch SGD over aligned per-sample tensors until the epoch budget or early stop.

    `loss_fn` receives one minibatch slice of each tensor, in order. Training stops early
    once the epoch-mean loss has failed to improve on the best value by `min_delta` for
    `patience` consecutive epochs.
    """
    trace = TrainingTrace(phase=phase, task_id=task_id)
    log_context = {"task_id": task_id, "phase": phase}
    budget = settings.effective_epochs if epochs is None else (min(epochs, 1) if settings.single_pass else epochs)
    if budget == 0:
        return trace

    optimizer = MomentumSGD(params, lr=settings.lr, momentum=settings.momentum)
    dataset = TensorDataset(*tensors)
    # Whole-minibatch indexing: the sampler yields index lists, so no per-sample collation.
    sampler = BatchSampler(
        RandomSampler(dataset, generator=make_generator(seed)), batch_size=settings.batch_size, drop_last=False
    )
    loader = DataLoader(dataset, sampler=sampler, batch_size=None)

    best = float("inf")
    stale_epochs = 0
    for epoch in range(budget):
        total, count = 0.0, 0
        for batch in loader:
            loss = loss_fn(*batch)
            try:
                optimizer.step(loss)
            except NumericalError as exc:
                exc.extra.update({"phase": phase, "task": task_id, "epoch": epoch})
                raise
            total += float(loss.detach()) * batch[0].shape[0]
            count += batch[0].shape[0]

        epoch_loss = total / count
        trace.epoch_losses.append(epoch_loss)
        logger.debug(f"task {task_id} {phase}: epoch {epoch} loss {epoch_loss:.6f}", extra=log_context)

        if best - epoch_loss < settings.min_delta:
            stale_epochs += 1
        else:
            stale_epochs = 0
        best = min(best, epoch_loss)
        if stale_epochs >= settings.patience:
            break

    logger.info(
        f"task {task_id} {phase}: {trace.epochs} epoch(s), final loss {trace.last_loss:.6f}", extra=log_context
    )
    return trace
