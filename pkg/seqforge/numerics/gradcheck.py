"""Central finite-difference verification of analytic gradients.

Every loss used in training is checked against this oracle in the test
suite.
"""

from typing import Callable, Sequence

import numpy as np

from seqforge.core.exceptions import NonFiniteLossError
from seqforge.numerics.tensor import Tensor
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)

MIN_EPSILON = 1e-7
MAX_EPSILON = 1e-3


def grad_check(
    loss_function: Callable[[], Tensor],
    parameters: Sequence[Tensor],
    epsilon: float = 1e-5,
) -> float:
    """Compare backpropagated gradients with central differences.

    Parameters
    ----------
    loss_function : Callable[[], Tensor]
        Builds a fresh graph and returns a scalar loss. It must read the
        current values of ``parameters`` on every call.
    parameters : Sequence[Tensor]
        Leaves whose gradients are checked (perturbed in place, restored).
    epsilon : float
        Perturbation size, in [1e-7, 1e-3].

    Returns
    -------
    float
        max over all parameter elements of
        |analytic - numeric| / max(1, |numeric|).

    Raises
    ------
    ValueError
        If epsilon is out of range.
    NonFiniteLossError
        If the loss at a perturbed point is not finite.

    Examples
    --------
    >>> p = Tensor.parameter([1.0, 2.0, 3.0])
    >>> grad_check(lambda: (p * p).sum(), [p]) < 1e-8
    True
    """
    if not MIN_EPSILON <= epsilon <= MAX_EPSILON:
        raise ValueError(f"epsilon must be in [{MIN_EPSILON}, {MAX_EPSILON}], got {epsilon}")

    for param in parameters:
        param.zero_grad()
    loss_function().backward()
    analytic = [
        param.grad.copy() if param.grad is not None else np.zeros_like(param.data)
        for param in parameters
    ]

    worst = 0.0
    worst_at = (-1, -1)
    for p_idx, param in enumerate(parameters):
        for flat_idx in range(param.size):
            idx = np.unravel_index(flat_idx, param.shape)
            original = param.data[idx]
            param.data[idx] = original + epsilon
            loss_plus = loss_function().item()
            param.data[idx] = original - epsilon
            loss_minus = loss_function().item()
            param.data[idx] = original
            if not (np.isfinite(loss_plus) and np.isfinite(loss_minus)):
                raise NonFiniteLossError(p_idx, flat_idx)
            numeric = (loss_plus - loss_minus) / (2.0 * epsilon)
            error = abs(analytic[p_idx][idx] - numeric) / max(1.0, abs(numeric))
            if error > worst:
                worst = error
                worst_at = (p_idx, flat_idx)

    for param in parameters:
        param.zero_grad()
    logger.debug(f"grad_check max relative error {worst:.3e} at parameter/element {worst_at}")
    return float(worst)
