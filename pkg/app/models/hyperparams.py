from pydantic import BaseModel, Field


class Hyperparams(BaseModel):
    """Loss weights shared by NFL, NFL+ and LwF.

    Defaults are desk-scale choices; every value is overridable from the run config.
    """

    model_config = {"extra": "forbid", "populate_by_name": True}

    lambda_: float = Field(default=1.0, ge=0.0, alias="lambda")
    omega: float = Field(default=1.0, ge=0.0)
    alpha: float = Field(default=0.5, ge=0.0, le=1.0)
    beta: float = Field(default=1.0, ge=0.0)
    p: float = Field(default=2.0, gt=1.0)
    Omega_: float = Field(default=1.0, ge=0.0, alias="Omega")
    eta: float = Field(default=0.5, ge=0.0, le=1.0)
    phi: float = Field(default=1.0, ge=0.0)
    rho: float = Field(default=0.1, ge=0.0)
    tau: float = Field(default=0.1, ge=0.0)


class OptimizerSettings(BaseModel):
    """SGD with classical momentum plus the "until convergence" stopping rule."""

    model_config = {"extra": "forbid"}

    lr: float = Field(default=0.01, ge=0.0)
    momentum: float = Field(default=0.9, ge=0.0, lt=1.0)
    batch_size: int = Field(default=64, ge=1)
    epochs: int = Field(default=20, ge=0)
    patience: int = Field(default=5, ge=1)
    min_delta: float = Field(default=1e-4, ge=0.0)
    # One epoch per training phase: every sample is seen once.
    single_pass: bool = False

    @property
    def effective_epochs(self) -> int:
        return min(self.epochs, 1) if self.single_pass else self.epochs


class NflOptions(BaseModel):
    model_config = {"extra": "forbid"}

    # Continue step 3 from the trained trunk/old heads instead of re-initialising them.
    step3_warm_start: bool = False
    holdout_fraction: float = Field(default=0.1, gt=0.0, lt=1.0)
    ae_epochs: int = Field(default=20, ge=0)
    bias_epochs: int = Field(default=20, ge=0)
    code_dim: int | None = Field(default=None, ge=1)
