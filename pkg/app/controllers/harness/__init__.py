from .compare import COLUMNS, ComparisonBuilder, ComparisonTable
from .plot_data import PlotDataBuilder
from .registry import LearnerRegistry
from .runner import ExperimentRunner

__all__ = ["COLUMNS", "ComparisonBuilder", "ComparisonTable", "ExperimentRunner", "LearnerRegistry", "PlotDataBuilder"]
