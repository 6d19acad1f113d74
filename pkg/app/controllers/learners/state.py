from dataclasses import dataclass, field
from typing import TYPE_CHECKING

from app.controllers.network.model import MultiHeadModel
from app.controllers.network.snapshot import ParameterSnapshot
from app.models.reports import TrainingTrace

if TYPE_CHECKING:
    from app.controllers.nfl_plus.autoencoder import AutoEncoder, BiasCorrector


@dataclass
class NflState:
    """What a continual learner carries from one task to the next.

    `frozen_head_snapshots[t]` is head t exactly as it was at the end of task t. The
    optional fields are populated by NFL+ (autoencoder trained on the latest task's
    features, and the last fitted bias corrector).
    """

    model: MultiHeadModel
    frozen_head_snapshots: list[ParameterSnapshot] = field(default_factory=list)
    task_count: int = 0
    autoencoder: "AutoEncoder | None" = None
    bias_corrector: "BiasCorrector | None" = None
    traces: list[TrainingTrace] = field(default_factory=list)

    @property
    def old_class_count(self) -> int:
        return sum(self.model.spec.head_dims[: self.task_count])

    @property
    def snapshot_parameter_count(self) -> int:
        """Scalars held in the stored head copies, which live alongside the model."""
        return sum(tensor.numel() for saved in self.frozen_head_snapshots for block in saved.blocks for tensor in block)
