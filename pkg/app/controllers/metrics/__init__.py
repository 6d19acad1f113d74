from .accuracy_csv import empty_matrix, read_accuracy_csv, write_accuracy_csv
from .memory import memory_footprint, to_megabytes
from .random_baseline import random_baseline_accuracy
from .scores import (
    as_matrix,
    avg_accuracy,
    avg_forgetting,
    bwt,
    compute_report,
    fwt,
    intransigence,
    plasticity_stability,
)

__all__ = [
    "as_matrix",
    "avg_accuracy",
    "avg_forgetting",
    "bwt",
    "compute_report",
    "empty_matrix",
    "fwt",
    "intransigence",
    "memory_footprint",
    "plasticity_stability",
    "random_baseline_accuracy",
    "read_accuracy_csv",
    "to_megabytes",
    "write_accuracy_csv",
]
