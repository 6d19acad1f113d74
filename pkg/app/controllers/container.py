from dependency_injector import containers, providers

from app.controllers.harness.compare import ComparisonBuilder
from app.controllers.harness.plot_data import PlotDataBuilder
from app.controllers.harness.registry import LearnerRegistry
from app.controllers.harness.runner import ExperimentRunner
from app.controllers.scenarios.evaluation import Evaluator
from app.controllers.scenarios.loaders import DatasetBuilder


class ControllerContainer(containers.DeclarativeContainer):
    config = providers.Configuration()

    dataset_builder = providers.Singleton(DatasetBuilder, data_dir=config.data_dir)
    evaluator = providers.Singleton(Evaluator)
    learner_registry = providers.Singleton(LearnerRegistry)

    experiment_runner = providers.Singleton(
        ExperimentRunner,
        dataset_builder=dataset_builder,
        evaluator=evaluator,
        learner_registry=learner_registry,
        torch_num_threads=config.torch_num_threads,
    )

    comparison_builder = providers.Singleton(ComparisonBuilder)
    plot_data_builder = providers.Singleton(PlotDataBuilder)
