from collections.abc import Callable

from app.controllers.baselines.finetune import FinetuneController
from app.controllers.baselines.joint import JointTrainer
from app.controllers.baselines.lwf import LwfController
from app.controllers.learners.base import ContinualLearner
from app.controllers.nfl.procedure import NflController
from app.controllers.nfl_plus.procedure import NflPlusController
from app.exceptions import ConfigError
from app.models.run_config import MethodName, RunConfig


class LearnerRegistry:
    """Resolves the learner for a run config's `method`."""

    def __init__(self) -> None:
        self._factories: dict[MethodName, Callable[[RunConfig], ContinualLearner]] = {
            MethodName.NFL: lambda config: NflController(config.hyperparams, config.optimizer, config.nfl, config.seed),
            MethodName.NFL_PLUS: lambda config: NflPlusController(
                config.hyperparams, config.optimizer, config.nfl, config.seed
            ),
            MethodName.FINETUNE: lambda config: FinetuneController(config.hyperparams, config.optimizer, config.seed),
            MethodName.LWF: lambda config: LwfController(config.hyperparams, config.optimizer, config.seed),
            MethodName.JOINT: lambda config: JointTrainer(config.hyperparams, config.optimizer, config.seed),
        }

    @property
    def methods(self) -> list[MethodName]:
        return list(self._factories)

    def create(self, config: RunConfig) -> ContinualLearner:
        factory = self._factories.get(config.method)
        if factory is None:
            raise ConfigError(f"No learner registered for method {config.method!r}")
        return factory(config)
