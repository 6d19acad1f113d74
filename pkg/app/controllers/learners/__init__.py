from .base import ContinualLearner
from .state import NflState

__all__ = ["ContinualLearner", "NflState"]
