from .finetune import FinetuneController
from .joint import JointTrainer
from .lwf import LwfController

__all__ = ["FinetuneController", "JointTrainer", "LwfController"]
