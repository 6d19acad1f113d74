"""
Pydantic models describing the classifier substrate.
"""

from enum import StrEnum

from pydantic import BaseModel, Field, PositiveInt


class Activation(StrEnum):
    RELU = "relu"
    IDENTITY = "identity"


class LayerSpec(BaseModel):
    """One affine trunk layer followed by its nonlinearity."""

    model_config = {"extra": "forbid"}

    width: int = Field(gt=0)
    activation: Activation = Activation.RELU


class ModelSpec(BaseModel):
    """Shared trunk plus one classification head per task (head_dims[t] = class count of task t)."""

    model_config = {"extra": "forbid"}

    input_dim: int = Field(gt=0)
    trunk_layers: list[LayerSpec] = Field(min_length=1)
    head_dims: list[PositiveInt] = Field(default_factory=list)

    @property
    def feature_dim(self) -> int:
        return self.trunk_layers[-1].width

    def with_head(self, num_classes: int) -> "ModelSpec":
        return self.model_copy(update={"head_dims": [*self.head_dims, num_classes]})


def desk_scale_spec(input_dim: int, head_dims: list[int], widths: tuple[int, ...] = (400, 400)) -> ModelSpec:
    """Reference MLP used at desk scale: ReLU hidden layers of width 400 for 28x28 inputs."""
    return ModelSpec(
        input_dim=input_dim,
        trunk_layers=[LayerSpec(width=width) for width in widths],
        head_dims=head_dims,
    )
