from .procedure import NflController, apply_head_snapshot

__all__ = ["NflController", "apply_head_snapshot"]
