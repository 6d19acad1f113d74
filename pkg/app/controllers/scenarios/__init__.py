from .evaluation import Evaluator
from .loaders import DatasetBuilder, load_cifar_binary, load_idx, make_blobs, read_idx, subtract_channel_mean
from .splits import split_classes
from .stream_cursor import StreamCursor

__all__ = [
    "DatasetBuilder",
    "Evaluator",
    "StreamCursor",
    "load_cifar_binary",
    "load_idx",
    "make_blobs",
    "read_idx",
    "split_classes",
    "subtract_channel_mean",
]
