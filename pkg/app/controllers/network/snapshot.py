"""
Parameter snapshots and their on-disk format.

File layout (`params_<tag>.bin`), all integers uint64 little-endian:
    block count
    per block: tensor count, then per tensor: ndim followed by its dims
followed by every tensor's values as float64 little-endian, in header order.
"""

import logging
from dataclasses import dataclass
from enum import StrEnum
from pathlib import Path

import numpy as np
import torch
from torch import nn

from app.controllers.network.model import DTYPE, MultiHeadModel
from app.exceptions import ArtifactIOError, ShapeMismatchError, TruncatedFileError

logger = logging.getLogger(__name__)

_U64 = np.dtype("<u8")
_F64 = np.dtype("<f8")


class SnapshotTag(StrEnum):
    RANDOM = "r"
    TRAINED = "trained"
    UPDATED = "u"
    FINETUNED = "f"
    FURTHER_FINETUNED = "f+"


@dataclass(frozen=True)
class ParameterSnapshot:
    tag: str
    blocks: tuple[tuple[torch.Tensor, ...], ...]

    @property
    def shapes(self) -> list[list[tuple[int, ...]]]:
        return [[tuple(tensor.shape) for tensor in block] for block in self.blocks]


def _copy_block(block: nn.Module) -> tuple[torch.Tensor, ...]:
    return tuple(param.detach().clone() for param in block.parameters())


def snapshot(model: MultiHeadModel, tag: str = SnapshotTag.TRAINED) -> ParameterSnapshot:
    return ParameterSnapshot(tag=str(tag), blocks=tuple(_copy_block(block) for block in model.blocks()))


def snapshot_module(module: nn.Module, tag: str) -> ParameterSnapshot:
    """Single-block snapshot of any module (one head, an autoencoder, a bias corrector)."""
    return ParameterSnapshot(tag=str(tag), blocks=(_copy_block(module),))


def restore(model: MultiHeadModel, saved: ParameterSnapshot) -> None:
    blocks = model.blocks()
    current = [[tuple(param.shape) for param in block.parameters()] for block in blocks]
    if current != saved.shapes:
        raise ShapeMismatchError(f"Snapshot '{saved.tag}' does not match the model's parameter layout")
    with torch.no_grad():
        for block, saved_block in zip(blocks, saved.blocks):
            for param, value in zip(block.parameters(), saved_block):
                param.copy_(value)


def restore_module(module: nn.Module, saved: ParameterSnapshot) -> None:
    (saved_block,) = saved.blocks
    params = list(module.parameters())
    if [tuple(p.shape) for p in params] != [tuple(t.shape) for t in saved_block]:
        raise ShapeMismatchError(f"Snapshot '{saved.tag}' does not match the module's parameter layout")
    with torch.no_grad():
        for param, value in zip(params, saved_block):
            param.copy_(value)


def write_snapshot(saved: ParameterSnapshot, directory: Path) -> Path:
    header: list[int] = [len(saved.blocks)]
    payload: list[np.ndarray] = []
    for block in saved.blocks:
        header.append(len(block))
        for tensor in block:
            header.append(tensor.ndim)
            header.extend(tensor.shape)
            payload.append(tensor.detach().cpu().numpy().astype(_F64).ravel())

    path = directory / f"params_{saved.tag}.bin"
    try:
        directory.mkdir(parents=True, exist_ok=True)
        with path.open("wb") as handle:
            handle.write(np.asarray(header, dtype=_U64).tobytes())
            for values in payload:
                handle.write(values.tobytes())
    except OSError as exc:
        raise ArtifactIOError(f"Could not write snapshot to {path}: {exc}") from exc
    return path


def read_snapshot(path: Path) -> ParameterSnapshot:
    try:
        raw = path.read_bytes()
    except OSError as exc:
        raise ArtifactIOError(f"Could not read snapshot {path}: {exc}") from exc

    cursor = 0

    def next_u64() -> int:
        nonlocal cursor
        if cursor + 8 > len(raw):
            raise TruncatedFileError(f"Snapshot header of {path} is truncated")
        value = int(np.frombuffer(raw, dtype=_U64, count=1, offset=cursor)[0])
        cursor += 8
        return value

    shapes: list[list[tuple[int, ...]]] = []
    for _ in range(next_u64()):
        block_shapes = []
        for _ in range(next_u64()):
            ndim = next_u64()
            block_shapes.append(tuple(next_u64() for _ in range(ndim)))
        shapes.append(block_shapes)

    blocks: list[tuple[torch.Tensor, ...]] = []
    for block_shapes in shapes:
        tensors = []
        for shape in block_shapes:
            count = int(np.prod(shape, dtype=np.int64))
            if cursor + 8 * count > len(raw):
                raise TruncatedFileError(f"Snapshot payload of {path} is truncated")
            values = np.frombuffer(raw, dtype=_F64, count=count, offset=cursor).copy()
            cursor += 8 * count
            tensors.append(torch.from_numpy(values.astype(np.float64)).reshape(shape).to(DTYPE))
        blocks.append(tuple(tensors))

    tag = path.stem.removeprefix("params_")
    return ParameterSnapshot(tag=tag, blocks=tuple(blocks))
