"""Bridge (feature-matching) loss and the composite interpreter objective."""

from typing import Optional, Union

import numpy as np

from seqforge.core.exceptions import ShapeError
from seqforge.numerics import tensor as T
from seqforge.numerics.tensor import Tensor, as_tensor


def bridge_loss(c_relu: Union[np.ndarray, Tensor], reduced: Tensor) -> Tensor:
    """Mean squared difference between frozen penultimate activations and the reduced IRL.

    Parameters
    ----------
    c_relu : array-like
        (S,) or (B, S) classifier penultimate activations. Treated as a
        constant: the classifier is frozen while this loss is optimized.
    reduced : Tensor
        Same shape, from ``reduce_irl``.

    Returns
    -------
    Tensor
        (1/S) * sum (c_relu - reduced)^2, averaged over players.

    Raises
    ------
    ShapeError
        If the shapes differ.

    Examples
    --------
    >>> bridge_loss(np.zeros(4), Tensor(np.full(4, 0.25))).item()
    0.0625
    """
    target = c_relu.data if isinstance(c_relu, Tensor) else np.asarray(c_relu, dtype=np.float64)
    if target.shape != reduced.shape:
        raise ShapeError(f"bridge_loss operands differ: {target.shape} vs {reduced.shape}")
    diff = reduced - target
    return T.mean(diff * diff)


def interpreter_total_loss(
    recon: Tensor,
    trace: Tensor,
    bridge: Optional[Tensor],
    beta: float,
    lambda_: float,
) -> Tensor:
    """``beta * (recon + lambda/2 * trace) + (1 - beta) * bridge``.

    ``bridge=None`` drops the bridge term entirely (first collaborative
    epoch, or ablation).

    Raises
    ------
    ValueError
        If beta is outside [0, 1] or lambda is negative.

    Examples
    --------
    >>> total = interpreter_total_loss(Tensor(2.0), Tensor(4.0), Tensor(1.0), 0.3, 0.5)
    >>> round(total.item(), 12)
    1.6
    """
    if not 0.0 <= beta <= 1.0:
        raise ValueError(f"beta must be in [0, 1], got {beta}")
    if lambda_ < 0:
        raise ValueError(f"lambda must be >= 0, got {lambda_}")
    interpreter = as_tensor(recon) + as_tensor(trace) * (lambda_ / 2.0)
    if bridge is None:
        return interpreter * beta
    return interpreter * beta + as_tensor(bridge) * (1.0 - beta)
