import enum
from typing import Any


class ErrorType(enum.Enum):
    ARTIFACT_IO = "artifact_io"
    CONFIG_INVALID = "config_invalid"
    DATA_FORMAT = "data_format"
    DATASET_NOT_FOUND = "dataset_not_found"
    DIMENSION_MISMATCH = "dimension_mismatch"
    EXEMPLAR_ACCESS = "exemplar_access"
    IDX_MAGIC = "idx_magic"
    INVALID_DATA = "invalid_data"
    NUMERICAL_FAILURE = "numerical_failure"
    SHAPE_MISMATCH = "shape_mismatch"
    TRUNCATED_FILE = "truncated_file"
    UNHANDLED_EXCEPTION = "unhandled_exception"
    UNSPECIFIED = "unspecified"


class ExitCode(enum.IntEnum):
    SUCCESS = 0
    CONFIG = 2
    RUNTIME = 3
    IO = 4


class BaseError(Exception):
    extra: dict[str, Any]

    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.UNSPECIFIED,
        exit_code: ExitCode = ExitCode.RUNTIME,
        **kwargs: Any,
    ) -> None:
        super().__init__(message)
        self.message = message
        self.error_type = error_type
        self.exit_code = exit_code
        self.extra = {key: value for key, value in kwargs.items() if value is not None}

    def __str__(self) -> str:
        return f"error: {self.error_type.value}; description: {self.message}"

    def to_dict(self) -> dict[str, Any]:
        return {
            "error": self.error_type.value,
            "message": self.message,
            "exit_code": int(self.exit_code),
            **self.extra,
        }


class ConfigError(BaseError):
    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.CONFIG_INVALID,
        exit_code: ExitCode = ExitCode.CONFIG,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, error_type, exit_code, **kwargs)


class InvalidDataError(BaseError):
    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.INVALID_DATA,
        exit_code: ExitCode = ExitCode.RUNTIME,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, error_type, exit_code, **kwargs)


class ShapeMismatchError(InvalidDataError):
    def __init__(self, message: str, **kwargs: Any) -> None:
        super().__init__(message, ErrorType.SHAPE_MISMATCH, **kwargs)


class NumericalError(BaseError):
    """A loss or gradient became NaN/Inf; the run cannot continue."""

    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.NUMERICAL_FAILURE,
        exit_code: ExitCode = ExitCode.RUNTIME,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, error_type, exit_code, **kwargs)


class ExemplarAccessError(BaseError):
    """A continual method asked for training data of a task other than the current one."""

    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.EXEMPLAR_ACCESS,
        exit_code: ExitCode = ExitCode.RUNTIME,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, error_type, exit_code, **kwargs)


class DataFormatError(BaseError):
    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.DATA_FORMAT,
        exit_code: ExitCode = ExitCode.IO,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, error_type, exit_code, **kwargs)


class DatasetNotFoundError(DataFormatError):
    def __init__(self, message: str, **kwargs: Any) -> None:
        super().__init__(message, ErrorType.DATASET_NOT_FOUND, **kwargs)


class IdxMagicError(DataFormatError):
    def __init__(self, message: str, **kwargs: Any) -> None:
        super().__init__(message, ErrorType.IDX_MAGIC, **kwargs)


class TruncatedFileError(DataFormatError):
    def __init__(self, message: str, **kwargs: Any) -> None:
        super().__init__(message, ErrorType.TRUNCATED_FILE, **kwargs)


class DimensionMismatchError(DataFormatError):
    def __init__(self, message: str, **kwargs: Any) -> None:
        super().__init__(message, ErrorType.DIMENSION_MISMATCH, **kwargs)


class ArtifactIOError(BaseError):
    def __init__(
        self,
        message: str,
        error_type: ErrorType = ErrorType.ARTIFACT_IO,
        exit_code: ExitCode = ExitCode.IO,
        **kwargs: Any,
    ) -> None:
        super().__init__(message, error_type, exit_code, **kwargs)
