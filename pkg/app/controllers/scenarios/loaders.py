"""
Dataset ingestion: IDX (MNIST) files, CIFAR-100 binary files and synthetic Gaussian blobs.

IDX layout, big-endian: two zero bytes, a type code (0x08 = unsigned byte), the number of
dimensions, one uint32 per dimension, then the raw values. CIFAR-100 binary records are
3074 bytes: coarse label, fine label, then 3 x 32 x 32 channel-major pixels.
"""

import gzip
import logging
from pathlib import Path

import numpy as np
import torch

from app.exceptions import (
    DataFormatError,
    DatasetNotFoundError,
    DimensionMismatchError,
    IdxMagicError,
    TruncatedFileError,
)
from app.models.run_config import DatasetConfig, DatasetKind
from app.models.stream import LabeledSet

logger = logging.getLogger(__name__)

IDX_UBYTE = 0x08
CIFAR_IMAGE_BYTES = 3 * 32 * 32
CIFAR_RECORD_BYTES = 2 + CIFAR_IMAGE_BYTES
CIFAR_LABEL_RANGES = {"coarse": 20, "fine": 100}


def _read_bytes(path: Path) -> bytes:
    if not path.is_file():
        raise DatasetNotFoundError(f"Dataset file {path} does not exist", path=str(path))
    opener = gzip.open if path.suffix == ".gz" else open
    try:
        with opener(path, "rb") as handle:
            return bytes(handle.read())
    except (OSError, EOFError) as exc:
        raise DataFormatError(f"Could not read {path}: {exc}", path=str(path)) from exc


def read_idx(path: Path) -> np.ndarray:
    raw = _read_bytes(path)
    if len(raw) < 4 or raw[0] != 0 or raw[1] != 0 or raw[2] != IDX_UBYTE or raw[3] == 0:
        raise IdxMagicError(f"{path} does not start with an unsigned-byte IDX magic number", path=str(path))
    ndim = raw[3]
    header_size = 4 + 4 * ndim
    if len(raw) < header_size:
        raise TruncatedFileError(f"IDX header of {path} is truncated", path=str(path))
    dims = tuple(int(dim) for dim in np.frombuffer(raw, dtype=">u4", count=ndim, offset=4))
    expected = int(np.prod(dims, dtype=np.int64))
    if len(raw) - header_size < expected:
        raise TruncatedFileError(
            f"{path} declares {expected} values but holds {len(raw) - header_size}", path=str(path)
        )
    return np.frombuffer(raw, dtype=np.uint8, count=expected, offset=header_size).reshape(dims)


def load_idx(images_path: Path, labels_path: Path) -> LabeledSet:
    """Images flattened row-major and scaled to [0, 1]; labels as int64."""
    images = read_idx(images_path)
    labels = read_idx(labels_path)
    if images.ndim != 3 or labels.ndim != 1:
        raise DimensionMismatchError(
            f"Expected 3-d images and 1-d labels, got {images.ndim}-d and {labels.ndim}-d",
            images=str(images_path),
            labels=str(labels_path),
        )
    if images.shape[0] != labels.shape[0]:
        raise DimensionMismatchError(
            f"{images.shape[0]} images but {labels.shape[0]} labels",
            images=str(images_path),
            labels=str(labels_path),
        )
    logger.info(f"Loaded {images.shape[0]} IDX images of {images.shape[1]}x{images.shape[2]} from {images_path}")
    return _labeled_set(images.reshape(images.shape[0], -1), labels)


def load_cifar_binary(path: Path, label_kind: str = "fine") -> LabeledSet:
    if label_kind not in CIFAR_LABEL_RANGES:
        raise DataFormatError(f"Unknown CIFAR label kind {label_kind!r}")
    raw = _read_bytes(path)
    if len(raw) == 0 or len(raw) % CIFAR_RECORD_BYTES:
        raise TruncatedFileError(
            f"{path} holds {len(raw)} bytes, not a whole number of {CIFAR_RECORD_BYTES}-byte records",
            path=str(path),
        )
    records = np.frombuffer(raw, dtype=np.uint8).reshape(-1, CIFAR_RECORD_BYTES)
    labels = records[:, 0 if label_kind == "coarse" else 1]
    if int(labels.max()) >= CIFAR_LABEL_RANGES[label_kind]:
        raise DataFormatError(
            f"{path} has {label_kind} label {int(labels.max())}, outside 0..{CIFAR_LABEL_RANGES[label_kind] - 1}",
            path=str(path),
        )
    logger.info(f"Loaded {records.shape[0]} CIFAR records ({label_kind} labels) from {path}")
    return _labeled_set(records[:, 2:], labels)


def _labeled_set(pixels: np.ndarray, labels: np.ndarray) -> LabeledSet:
    inputs = torch.from_numpy(pixels.astype(np.float64) / 255.0)
    return LabeledSet(inputs=inputs, labels=torch.from_numpy(labels.astype(np.int64)))


def make_blobs(
    num_classes: int,
    per_class_train: int,
    per_class_test: int,
    dim: int,
    spread: float,
    seed: int,
    center_scale: float = 4.0,
) -> tuple[LabeledSet, LabeledSet]:
    """Isotropic Gaussian clusters around seeded centers; train and test drawn from the same centers."""
    rng = np.random.default_rng(seed)
    centers = rng.normal(scale=center_scale, size=(num_classes, dim))

    def draw(per_class: int) -> LabeledSet:
        points = centers[:, None, :] + rng.normal(scale=spread, size=(num_classes, per_class, dim))
        labels = np.repeat(np.arange(num_classes), per_class)
        return LabeledSet(
            inputs=torch.from_numpy(points.reshape(-1, dim)), labels=torch.from_numpy(labels.astype(np.int64))
        )

    return draw(per_class_train), draw(per_class_test)


def subtract_channel_mean(train: LabeledSet, test: LabeledSet, channels: int) -> tuple[LabeledSet, LabeledSet]:
    """Subtract the training set's per-channel mean (channel-major layout) from both splits."""
    if train.input_dim % channels:
        raise DimensionMismatchError(f"Input width {train.input_dim} is not divisible by {channels} channels")
    means = train.inputs.reshape(len(train), channels, -1).mean(dim=(0, 2))
    shift = means.repeat_interleave(train.input_dim // channels)
    return (
        LabeledSet(inputs=train.inputs - shift, labels=train.labels),
        LabeledSet(inputs=test.inputs - shift, labels=test.labels),
    )


def cap_per_class(data: LabeledSet, limit: int | None) -> LabeledSet:
    """Keep the first `limit` samples of every class, in file order."""
    if limit is None:
        return data
    keep = torch.zeros(len(data), dtype=torch.bool)
    for label in torch.unique(data.labels):
        keep[torch.nonzero(data.labels == label).flatten()[:limit]] = True
    return data.subset(keep)


class DatasetBuilder:
    """Resolves dataset paths against the data root and produces (train, test) sets."""

    def __init__(self, data_dir: str | Path) -> None:
        self._data_dir = Path(data_dir)

    def resolve(self, path: str | None, field_name: str) -> Path:
        if path is None:
            raise DatasetNotFoundError(f"Dataset config is missing '{field_name}'", field=field_name)
        candidate = Path(path)
        return candidate if candidate.is_absolute() else self._data_dir / candidate

    def build(self, config: DatasetConfig, seed: int) -> tuple[LabeledSet, LabeledSet]:
        channels = 1
        match config.kind:
            case DatasetKind.MNIST_IDX:
                train = load_idx(
                    self.resolve(config.train_images, "train_images"), self.resolve(config.train_labels, "train_labels")
                )
                test = load_idx(
                    self.resolve(config.test_images, "test_images"), self.resolve(config.test_labels, "test_labels")
                )
            case DatasetKind.CIFAR100_BIN:
                train = load_cifar_binary(self.resolve(config.cifar_train, "cifar_train"), config.cifar_label_kind)
                test = load_cifar_binary(self.resolve(config.cifar_test, "cifar_test"), config.cifar_label_kind)
                channels = 3
            case DatasetKind.SYNTHETIC_BLOBS:
                blobs = config.blobs
                train, test = make_blobs(
                    blobs.num_classes,
                    blobs.per_class_train,
                    blobs.per_class_test,
                    blobs.dim,
                    blobs.spread,
                    seed=seed,
                    center_scale=blobs.center_scale,
                )

        train = cap_per_class(train, config.max_train_per_class)
        test = cap_per_class(test, config.max_test_per_class)
        if config.subtract_channel_mean:
            train, test = subtract_channel_mean(train, test, channels)
        return train, test
