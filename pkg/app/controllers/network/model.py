import logging
import math
from collections.abc import Iterator, Sequence

import numpy as np
import torch
from torch import nn

from app.exceptions import InvalidDataError, ShapeMismatchError
from app.models.network import Activation, ModelSpec

logger = logging.getLogger(__name__)

DTYPE = torch.float64


def derive_seed(*keys: int | str) -> int:
    """Stable 63-bit seed from a base seed plus labels such as task index and phase name."""
    entropy = [key if isinstance(key, int) else int.from_bytes(key.encode(), "little") for key in keys]
    return int(np.random.SeedSequence(entropy).generate_state(1, dtype=np.uint64)[0] >> np.uint64(1))


def make_generator(seed: int) -> torch.Generator:
    generator = torch.Generator()
    generator.manual_seed(seed)
    return generator


def he_normal_(weight: torch.Tensor, generator: torch.Generator) -> torch.Tensor:
    """Gaussian init with variance 2 / fan_in (fan_in = weight.shape[1])."""
    std = math.sqrt(2.0 / weight.shape[1])
    with torch.no_grad():
        weight.copy_(torch.randn(weight.shape, generator=generator, dtype=weight.dtype) * std)
    return weight


def _affine(in_features: int, out_features: int, generator: torch.Generator) -> nn.Linear:
    layer = nn.Linear(in_features, out_features, dtype=DTYPE)
    he_normal_(layer.weight, generator)
    with torch.no_grad():
        layer.bias.zero_()
    return layer


class MultiHeadModel(nn.Module):
    """Shared trunk (theta_s) with one linear head per task (theta_1..theta_t).

    Parameter blocks are ordered [trunk, head 0, head 1, ...]; the trainable mask
    follows the same order.
    """

    def __init__(self, spec: ModelSpec, seed: int) -> None:
        super().__init__()
        self.spec = spec.model_copy(update={"head_dims": []})
        generator = make_generator(derive_seed(seed, "trunk"))

        layers: list[nn.Module] = []
        fan_in = spec.input_dim
        for layer_spec in spec.trunk_layers:
            layers.append(_affine(fan_in, layer_spec.width, generator))
            if layer_spec.activation == Activation.RELU:
                layers.append(nn.ReLU())
            fan_in = layer_spec.width
        self.trunk = nn.Sequential(*layers)
        self.heads = nn.ModuleList()

        for index, num_classes in enumerate(spec.head_dims):
            self.add_head(num_classes, seed=derive_seed(seed, "head", index))

    @property
    def head_count(self) -> int:
        return len(self.heads)

    @property
    def feature_dim(self) -> int:
        return self.spec.feature_dim

    def blocks(self) -> list[nn.Module]:
        return [self.trunk, *self.heads]

    def head_offsets(self) -> list[int]:
        offsets = [0]
        for num_classes in self.spec.head_dims[:-1]:
            offsets.append(offsets[-1] + num_classes)
        return offsets

    def features(self, inputs: torch.Tensor) -> torch.Tensor:
        if inputs.ndim != 2 or inputs.shape[1] != self.spec.input_dim:
            raise ShapeMismatchError(
                f"Expected inputs of shape (N, {self.spec.input_dim}), got {tuple(inputs.shape)}"
            )
        return self.trunk(inputs)

    def head_logits(self, features: torch.Tensor, head_id: int) -> torch.Tensor:
        self._require_head(head_id)
        return self.heads[head_id](features)

    def forward(self, inputs: torch.Tensor, heads: Sequence[int] | None = None) -> list[torch.Tensor]:
        """Pre-softmax logits for each requested head (all heads when `heads` is None)."""
        head_ids = list(range(self.head_count)) if heads is None else list(heads)
        for head_id in head_ids:
            self._require_head(head_id)
        features = self.features(inputs)
        return [self.heads[head_id](features) for head_id in head_ids]

    def add_head(self, num_classes: int, seed: int) -> int:
        if num_classes < 1:
            raise InvalidDataError(f"A head needs at least one class, got {num_classes}")
        head = _affine(self.feature_dim, num_classes, make_generator(seed))
        self.heads.append(head)
        self.spec = self.spec.with_head(num_classes)
        return self.head_count - 1

    def reinitialize_block(self, block_id: int, seed: int) -> None:
        generator = make_generator(seed)
        for module in self.blocks()[block_id].modules():
            if isinstance(module, nn.Linear):
                he_normal_(module.weight, generator)
                with torch.no_grad():
                    module.bias.zero_()

    def set_trainable(self, mask: Sequence[bool]) -> None:
        blocks = self.blocks()
        if len(mask) != len(blocks):
            raise ShapeMismatchError(f"Mask has {len(mask)} entries but the model has {len(blocks)} blocks")
        for block, trainable in zip(blocks, mask):
            block.requires_grad_(bool(trainable))

    @property
    def trainable_mask(self) -> list[bool]:
        return [all(param.requires_grad for param in block.parameters()) for block in self.blocks()]

    def trainable_parameters(self) -> Iterator[nn.Parameter]:
        return (param for param in self.parameters() if param.requires_grad)

    def parameter_count(self) -> int:
        return sum(param.numel() for param in self.parameters())

    def _require_head(self, head_id: int) -> None:
        if not 0 <= head_id < self.head_count:
            raise InvalidDataError(f"Unknown head id {head_id}; model has {self.head_count} heads")


def build_model(spec: ModelSpec, seed: int) -> MultiHeadModel:
    model = MultiHeadModel(spec, seed)
    logger.debug(f"Built model with {model.parameter_count()} parameters and {model.head_count} heads")
    return model
