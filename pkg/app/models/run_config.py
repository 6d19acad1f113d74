"""
Run configuration: a single JSON document, unknown keys rejected at every level.
"""

from enum import StrEnum

from pydantic import BaseModel, Field, PositiveInt

from app.models.hyperparams import Hyperparams, NflOptions, OptimizerSettings
from app.models.stream import ScenarioMode


class MethodName(StrEnum):
    NFL = "nfl"
    NFL_PLUS = "nfl_plus"
    FINETUNE = "finetune"
    JOINT = "joint"
    LWF = "lwf"


class DatasetKind(StrEnum):
    MNIST_IDX = "mnist_idx"
    CIFAR100_BIN = "cifar100_bin"
    SYNTHETIC_BLOBS = "synthetic_blobs"


class BlobSettings(BaseModel):
    model_config = {"extra": "forbid"}

    num_classes: int = Field(default=4, ge=2)
    dim: int = Field(default=2, ge=1)
    per_class_train: int = Field(default=100, ge=1)
    per_class_test: int = Field(default=100, ge=1)
    spread: float = Field(default=0.4, gt=0.0)
    center_scale: float = Field(default=4.0, gt=0.0)


class DatasetConfig(BaseModel):
    model_config = {"extra": "forbid"}

    kind: DatasetKind
    # Paths may be relative to NFL_DATA_DIR.
    train_images: str | None = None
    train_labels: str | None = None
    test_images: str | None = None
    test_labels: str | None = None
    cifar_train: str | None = None
    cifar_test: str | None = None
    cifar_label_kind: str = Field(default="fine", pattern="^(fine|coarse)$")
    subtract_channel_mean: bool = False
    max_train_per_class: PositiveInt | None = None
    max_test_per_class: PositiveInt | None = None
    blobs: BlobSettings = Field(default_factory=BlobSettings)


class RunConfig(BaseModel):
    model_config = {"extra": "forbid"}

    method: MethodName
    dataset: DatasetConfig
    num_tasks: int = Field(ge=1)
    mode: ScenarioMode = ScenarioMode.TASK_IL
    seed: int = Field(ge=0)
    trunk_widths: list[PositiveInt] = Field(default_factory=lambda: [400, 400], min_length=1)
    hyperparams: Hyperparams = Field(default_factory=Hyperparams)
    optimizer: OptimizerSettings = Field(default_factory=OptimizerSettings)
    nfl: NflOptions = Field(default_factory=NflOptions)
    output_dir: str
    ps_eps: float = Field(default=1e-8, gt=0.0)
    fwt: bool = True
    fwt_baseline_seeds: int = Field(default=5, ge=1)
    a_star: float | None = Field(default=None, ge=0.0, le=1.0)
    reference_run_dir: str | None = None
    save_params: bool = True
