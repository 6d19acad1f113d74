from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

from pydantic import BaseModel

PS_NO_FORGETTING: Literal["no_forgetting"] = "no_forgetting"


class MetricsReport(BaseModel):
    """All CL metrics on the fraction scale. Fields are None when their inputs were not available."""

    acc: float
    fwt: float | None = None
    bwt: float | None = None
    af: float | None = None
    intransigence: float | None = None
    ps: float | Literal["no_forgetting"] | None = None
    b: list[float] | None = None
    a_star: float | None = None


@dataclass
class TrainingTrace:
    phase: str
    task_id: int
    epoch_losses: list[float] = field(default_factory=list)

    @property
    def epochs(self) -> int:
        return len(self.epoch_losses)

    @property
    def last_loss(self) -> float | None:
        return self.epoch_losses[-1] if self.epoch_losses else None

    @property
    def best_losses(self) -> list[float]:
        """Running minimum of the epoch-mean loss."""
        best: list[float] = []
        for loss in self.epoch_losses:
            best.append(min(loss, best[-1]) if best else loss)
        return best

    def to_dict(self) -> dict[str, object]:
        return {"phase": self.phase, "task_id": self.task_id, "epochs": self.epochs, "last_loss": self.last_loss}


@dataclass(frozen=True)
class RunArtifacts:
    run_dir: Path
    acc_matrix: Path
    metrics: Path
    run_meta: Path
    params_dir: Path | None = None
