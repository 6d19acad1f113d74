from .hyperparams import Hyperparams, NflOptions, OptimizerSettings
from .network import Activation, LayerSpec, ModelSpec
from .reports import PS_NO_FORGETTING, MetricsReport, RunArtifacts, TrainingTrace
from .run_config import DatasetConfig, DatasetKind, MethodName, RunConfig
from .stream import LabeledSet, LabelMap, ScenarioMode, TaskData, TaskStream

__all__ = [
    "Activation",
    "DatasetConfig",
    "DatasetKind",
    "Hyperparams",
    "LabeledSet",
    "LabelMap",
    "LayerSpec",
    "MethodName",
    "MetricsReport",
    "ModelSpec",
    "NflOptions",
    "OptimizerSettings",
    "PS_NO_FORGETTING",
    "RunArtifacts",
    "RunConfig",
    "ScenarioMode",
    "TaskData",
    "TaskStream",
    "TrainingTrace",
]
