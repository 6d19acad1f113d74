from app.exceptions import InvalidDataError

BYTES_PER_PARAMETER = 4
BYTES_PER_MEGABYTE = 1_000_000


def memory_footprint(param_count: int, exemplar_count: int = 0, bytes_per_exemplar: int = 0) -> int:
    """Bytes to keep the model (32-bit floats) plus any stored exemplars."""
    if min(param_count, exemplar_count, bytes_per_exemplar) < 0:
        raise InvalidDataError("Memory accounting needs nonnegative counts")
    return param_count * BYTES_PER_PARAMETER + exemplar_count * bytes_per_exemplar


def to_megabytes(size_bytes: int | float) -> float:
    return size_bytes / BYTES_PER_MEGABYTE
