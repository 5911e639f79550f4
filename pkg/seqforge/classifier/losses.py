"""Categorical cross-entropy for the classifier."""

import numpy as np

from seqforge.core.constants import PROBABILITY_FLOOR
from seqforge.core.exceptions import ShapeError
from seqforge.numerics import tensor as T
from seqforge.numerics.tensor import Tensor


def cce_loss(probabilities: Tensor, labels: np.ndarray) -> Tensor:
    """Batch mean of ``-log p[label]``.

    Probabilities are floored at 1e-12 before the log.

    Parameters
    ----------
    probabilities : Tensor
        (B, C) rows summing to 1.
    labels : np.ndarray
        (B,) class indices.

    Returns
    -------
    Tensor
        Scalar loss.

    Examples
    --------
    >>> p = Tensor(np.full((1, 3), 1.0 / 3.0))
    >>> round(cce_loss(p, np.array([0])).item(), 4)
    1.0986
    """
    labels = np.asarray(labels, dtype=np.int64)
    if probabilities.ndim != 2 or labels.shape != (probabilities.shape[0],):
        raise ShapeError(
            f"cce_loss needs (B, C) probabilities and (B,) labels, "
            f"got {probabilities.shape} and {labels.shape}"
        )
    if labels.size and (labels.min() < 0 or labels.max() >= probabilities.shape[1]):
        raise ValueError(f"labels must be in [0, {probabilities.shape[1]})")
    picked = probabilities[np.arange(labels.size), labels]
    return -T.mean(T.log(T.clip_min(picked, PROBABILITY_FLOOR)))
