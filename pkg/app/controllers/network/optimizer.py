from collections.abc import Iterable

import torch

from app.exceptions import InvalidDataError, NumericalError


class MomentumSGD:
    """SGD with classical momentum: v <- momentum * v + g, w <- w - lr * v.

    Built over the parameters that are trainable at construction time; anything frozen
    afterwards (or never handed in) is left untouched by `step`.
    """

    def __init__(self, params: Iterable[torch.Tensor], lr: float, momentum: float) -> None:
        if lr < 0:
            raise InvalidDataError(f"Learning rate must be >= 0, got {lr}")
        if not 0 <= momentum < 1:
            raise InvalidDataError(f"Momentum must be in [0, 1), got {momentum}")
        self._params = [param for param in params if param.requires_grad]
        self._optimizer = (
            torch.optim.SGD(self._params, lr=lr, momentum=momentum, foreach=False) if self._params else None
        )

    @property
    def param_count(self) -> int:
        return len(self._params)

    def step(self, loss: torch.Tensor) -> None:
        if not torch.isfinite(loss).all():
            raise NumericalError(f"Non-finite loss {loss.item()}")
        if self._optimizer is None:
            return

        self._optimizer.zero_grad(set_to_none=True)
        loss.backward()
        for param in self._params:
            if param.grad is not None and not torch.isfinite(param.grad).all():
                raise NumericalError("Non-finite gradient encountered")
        self._optimizer.step()


def sgd_step(params: Iterable[torch.Tensor], loss: torch.Tensor, lr: float, momentum: float = 0.0) -> None:
    """One plain step without persistent velocity (momentum applies from the first step only)."""
    MomentumSGD(params, lr=lr, momentum=momentum).step(loss)
