from .autoencoder import AutoEncoder, BiasCorrector, adjust_logits, default_code_dim, encode
from .procedure import NflPlusController

__all__ = ["AutoEncoder", "BiasCorrector", "NflPlusController", "adjust_logits", "default_code_dim", "encode"]
