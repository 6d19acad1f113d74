from .model import DTYPE, MultiHeadModel, build_model, derive_seed, make_generator
from .optimizer import MomentumSGD, sgd_step
from .snapshot import (
    ParameterSnapshot,
    SnapshotTag,
    read_snapshot,
    restore,
    restore_module,
    snapshot,
    snapshot_module,
    write_snapshot,
)
from .training import fit

__all__ = [
    "DTYPE",
    "MomentumSGD",
    "MultiHeadModel",
    "ParameterSnapshot",
    "SnapshotTag",
    "build_model",
    "derive_seed",
    "fit",
    "make_generator",
    "read_snapshot",
    "restore",
    "restore_module",
    "sgd_step",
    "snapshot",
    "snapshot_module",
    "write_snapshot",
]
