"""Adam optimizer over ``Tensor`` parameters."""

from typing import List, Sequence

import numpy as np

from seqforge.core.constants import DEFAULT_LEARNING_RATE
from seqforge.numerics.tensor import Tensor


class Adam:
    """Adaptive moment estimation with bias correction.

    Parameters
    ----------
    parameters : Sequence[Tensor]
        Leaves updated in place by ``step``.
    lr : float
        Step size.
    beta1, beta2 : float
        Decay rates of the first and second moment estimates.
    eps : float
        Denominator floor.
    """

    def __init__(
        self,
        parameters: Sequence[Tensor],
        lr: float = DEFAULT_LEARNING_RATE,
        beta1: float = 0.9,
        beta2: float = 0.999,
        eps: float = 1e-8,
    ) -> None:
        if lr <= 0:
            raise ValueError(f"lr must be > 0, got {lr}")
        self.parameters: List[Tensor] = list(parameters)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.t = 0
        self._m = [np.zeros_like(p.data) for p in self.parameters]
        self._v = [np.zeros_like(p.data) for p in self.parameters]

    def step(self) -> None:
        """Apply one update using the gradients currently stored on the parameters.

        Parameters without a gradient (unused in the last graph) are left
        untouched, moments included.
        """
        self.t += 1
        correction1 = 1.0 - self.beta1**self.t
        correction2 = 1.0 - self.beta2**self.t
        for i, param in enumerate(self.parameters):
            if param.grad is None:
                continue
            g = param.grad
            self._m[i] = self.beta1 * self._m[i] + (1.0 - self.beta1) * g
            self._v[i] = self.beta2 * self._v[i] + (1.0 - self.beta2) * g * g
            m_hat = self._m[i] / correction1
            v_hat = self._v[i] / correction2
            param.data -= self.lr * m_hat / (np.sqrt(v_hat) + self.eps)

    def zero_grad(self) -> None:
        for param in self.parameters:
            param.zero_grad()
