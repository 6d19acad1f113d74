import logging

import torch
from torch import nn

from app.controllers.network.model import DTYPE, he_normal_, make_generator
from app.exceptions import InvalidDataError, ShapeMismatchError

logger = logging.getLogger(__name__)


def default_code_dim(feature_dim: int, old_class_count: int) -> int:
    """max(c_old, feature_dim // 8), kept strictly below feature_dim."""
    code_dim = min(max(old_class_count, feature_dim // 8), feature_dim - 1)
    if code_dim < 1 or code_dim < old_class_count:
        raise InvalidDataError(
            f"Feature width {feature_dim} leaves no under-complete code of at least {old_class_count} units"
        )
    return code_dim


class AutoEncoder(nn.Module):
    """Under-complete feature autoencoder R(x) = W_dec sigmoid(W_enc x), without biases."""

    def __init__(self, feature_dim: int, code_dim: int, seed: int) -> None:
        super().__init__()
        if not 0 < code_dim < feature_dim:
            raise InvalidDataError(f"code_dim must lie in [1, {feature_dim}), got {code_dim}")
        generator = make_generator(seed)
        self.encoder = nn.Linear(feature_dim, code_dim, bias=False, dtype=DTYPE)
        self.decoder = nn.Linear(code_dim, feature_dim, bias=False, dtype=DTYPE)
        he_normal_(self.encoder.weight, generator)
        he_normal_(self.decoder.weight, generator)

    @property
    def feature_dim(self) -> int:
        return int(self.encoder.weight.shape[1])

    @property
    def code_dim(self) -> int:
        return int(self.encoder.weight.shape[0])

    def encode(self, features: torch.Tensor) -> torch.Tensor:
        if features.ndim != 2 or features.shape[1] != self.feature_dim:
            raise ShapeMismatchError(f"Expected features of width {self.feature_dim}, got {tuple(features.shape)}")
        return torch.sigmoid(self.encoder(features))

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        return self.decoder(self.encode(features))

    def encoder_parameter_count(self) -> int:
        return self.encoder.weight.numel()


def encode(autoencoder: AutoEncoder, features: torch.Tensor) -> torch.Tensor:
    return autoencoder.encode(features)


class BiasCorrector(nn.Module):
    """Gamma(f) = (w_bias * W_enc) f + b_bias, pooled to one multiplier per old class.

    W_enc is a frozen copy of the encoder weights. With w_bias = 0 and b_bias = 1 the map is
    identically 1. When code_dim exceeds the old class count, code units are averaged in
    contiguous groups (sizes differ by at most one).
    """

    def __init__(self, encoder_weight: torch.Tensor, old_class_count: int) -> None:
        super().__init__()
        code_dim = int(encoder_weight.shape[0])
        if not 0 < old_class_count <= code_dim:
            raise InvalidDataError(
                f"Bias corrector needs 1 <= old classes ({old_class_count}) <= code_dim ({code_dim})"
            )
        self.old_class_count = old_class_count
        self.register_buffer("encoder_weight", encoder_weight.detach().clone())
        self.w_bias = nn.Parameter(torch.zeros_like(self.encoder_weight))
        self.b_bias = nn.Parameter(torch.ones(code_dim, dtype=encoder_weight.dtype))

    def forward(self, features: torch.Tensor) -> torch.Tensor:
        encoder_weight: torch.Tensor = self.encoder_weight
        if features.ndim != 2 or features.shape[1] != encoder_weight.shape[1]:
            raise ShapeMismatchError(
                f"Expected features of width {encoder_weight.shape[1]}, got {tuple(features.shape)}"
            )
        codes = features @ (self.w_bias * encoder_weight).T + self.b_bias
        if codes.shape[1] == self.old_class_count:
            return codes
        groups = torch.tensor_split(codes, self.old_class_count, dim=1)
        return torch.stack([group.mean(dim=1) for group in groups], dim=1)


def adjust_logits(gamma_outputs: torch.Tensor, H: torch.Tensor) -> torch.Tensor:
    """H' = Gamma * H, elementwise."""
    if gamma_outputs.shape != H.shape:
        raise ShapeMismatchError(f"Gamma {tuple(gamma_outputs.shape)} does not match H {tuple(H.shape)}")
    return gamma_outputs * H
