"""
Scalar loss terms for NFL / NFL+ training.

Every function takes dense float64 tensors and returns a 0-dim tensor that autograd can
differentiate. Expectations are minibatch means and squared norms are means over all
entries, so the weight hyperparameters stay independent of batch size and width.
"""

import logging
from dataclasses import dataclass

import torch
import torch.nn.functional as F

from app.exceptions import InvalidDataError, NumericalError, ShapeMismatchError
from app.models.hyperparams import Hyperparams

logger = logging.getLogger(__name__)


@dataclass
class LogitRecord:
    """Soft targets recorded on the new task's inputs.

    H: old heads' logits from the model as it was before the new task (N x c_old).
    H_tilde: fine-tuned trunk composed with the stored original heads.
    H_prime: bias-adjusted H (NFL+ only).
    """

    H: torch.Tensor
    H_tilde: torch.Tensor | None = None
    H_prime: torch.Tensor | None = None

    def __post_init__(self) -> None:
        for name in ("H", "H_tilde", "H_prime"):
            value = getattr(self, name)
            if value is None:
                continue
            if value.shape != self.H.shape:
                raise ShapeMismatchError(f"{name} has shape {tuple(value.shape)}, H has {tuple(self.H.shape)}")
            if not torch.isfinite(value).all():
                raise NumericalError(f"{name} contains non-finite entries")

    @property
    def old_class_count(self) -> int:
        return int(self.H.shape[1])


def _require_same_shape(left: torch.Tensor, right: torch.Tensor, what: str) -> None:
    if left.shape != right.shape:
        raise ShapeMismatchError(f"{what}: shapes {tuple(left.shape)} and {tuple(right.shape)} differ")


def cross_entropy(logits: torch.Tensor, labels: torch.Tensor) -> torch.Tensor:
    """Mean over rows of -log softmax(logits)[label]."""
    if logits.ndim != 2 or labels.shape != (logits.shape[0],):
        raise ShapeMismatchError(f"cross_entropy: logits {tuple(logits.shape)} vs labels {tuple(labels.shape)}")
    if labels.numel() and (int(labels.min()) < 0 or int(labels.max()) >= logits.shape[1]):
        raise InvalidDataError(f"Labels must lie in [0, {logits.shape[1]})")
    if not torch.isfinite(logits).all():
        raise NumericalError("cross_entropy received non-finite logits")
    return F.cross_entropy(logits, labels, reduction="mean")


def temper(probs: torch.Tensor, p: float) -> torch.Tensor:
    """Raise each probability to 1/p and renormalise along the last axis."""
    if (probs < 0).any():
        raise InvalidDataError("temper expects nonnegative probabilities")
    if p <= 0:
        raise InvalidDataError(f"Temperature must be positive, got {p}")
    powered = probs.pow(1.0 / p)
    return powered / powered.sum(dim=-1, keepdim=True)


def _log_tempered_softmax(logits: torch.Tensor, p: float) -> torch.Tensor:
    # log of temper(softmax(z), p), evaluated in the log domain: (log softmax z) / p renormalised.
    return F.log_softmax(F.log_softmax(logits, dim=-1) / p, dim=-1)


def kd_loss(recorded_logits: torch.Tensor, current_logits: torch.Tensor, p: float) -> torch.Tensor:
    """Cross-entropy between tempered recorded and tempered current class distributions.

    Both inputs are logits over the same (old) classes. The value is minimised over
    `current_logits` where the tempered distributions coincide, and equals the entropy of
    the tempered recorded distribution there.
    """
    _require_same_shape(recorded_logits, current_logits, "kd_loss")
    if p <= 0:
        raise InvalidDataError(f"Temperature must be positive, got {p}")
    target = _log_tempered_softmax(recorded_logits, p).exp()
    log_current = _log_tempered_softmax(current_logits, p)
    return -(target * log_current).sum(dim=-1).mean()


def loss_L3(
    H: torch.Tensor, O3_old: torch.Tensor, Y_new: torch.Tensor, O3_new: torch.Tensor, hp: Hyperparams
) -> torch.Tensor:
    return kd_loss(H, O3_old, hp.p) + hp.lambda_ * cross_entropy(O3_new, Y_new)


def loss_L4(
    H: torch.Tensor, O4_old: torch.Tensor, Y_new: torch.Tensor, O4_new: torch.Tensor, hp: Hyperparams
) -> torch.Tensor:
    return kd_loss(H, O4_old, hp.p) + hp.omega * cross_entropy(O4_new, Y_new)


def loss_L5(
    H: torch.Tensor,
    O5_old: torch.Tensor,
    H_tilde: torch.Tensor,
    O5_old_updated: torch.Tensor,
    Y_new: torch.Tensor,
    O5_new: torch.Tensor,
    hp: Hyperparams,
) -> torch.Tensor:
    return (
        hp.alpha * kd_loss(H, O5_old, hp.p)
        + (1.0 - hp.alpha) * kd_loss(H_tilde, O5_old_updated, hp.p)
        + hp.beta * cross_entropy(O5_new, Y_new)
    )


def ae_objective(
    features: torch.Tensor,
    reconstructed: torch.Tensor,
    head_logits_on_reconstruction: torch.Tensor,
    labels: torch.Tensor,
    Omega_: float,
) -> torch.Tensor:
    _require_same_shape(features, reconstructed, "ae_objective")
    reconstruction = (reconstructed - features).pow(2).mean()
    return Omega_ * reconstruction + cross_entropy(head_logits_on_reconstruction, labels)


def drift_reg(code_current: torch.Tensor, code_reference: torch.Tensor) -> torch.Tensor:
    _require_same_shape(code_current, code_reference, "drift_reg")
    return (code_current - code_reference).pow(2).mean()


def bias_reg(gamma_outputs: torch.Tensor) -> torch.Tensor:
    return (gamma_outputs - 1.0).pow(2).mean()


def loss_L5_plus(
    H_prime: torch.Tensor,
    O5_old: torch.Tensor,
    H_tilde: torch.Tensor,
    O5_old_updated: torch.Tensor,
    Y_new: torch.Tensor,
    O5_new: torch.Tensor,
    code_current: torch.Tensor,
    code_reference: torch.Tensor,
    gamma_outputs: torch.Tensor,
    hp: Hyperparams,
) -> torch.Tensor:
    return (
        hp.eta * kd_loss(H_prime, O5_old, hp.p)
        + (1.0 - hp.eta) * kd_loss(H_tilde, O5_old_updated, hp.p)
        + hp.phi * cross_entropy(O5_new, Y_new)
        + hp.rho * drift_reg(code_current, code_reference)
        + hp.tau * bias_reg(gamma_outputs)
    )
