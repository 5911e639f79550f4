"""Interpreter losses: masked reconstruction and the spectral k-means trace loss."""

import numpy as np

from seqforge.core.exceptions import ShapeError
from seqforge.numerics import tensor as T
from seqforge.numerics.linalg import ClusterIndicator
from seqforge.numerics.tensor import ArrayLike, Tensor, as_tensor


def reconstruction_mask(valid_lengths: np.ndarray, length: int) -> np.ndarray:
    """(B, L, 1) weights 1/valid_length on valid steps, 0 elsewhere."""
    valid_lengths = np.asarray(valid_lengths, dtype=np.int64)
    steps = np.arange(length)[None, :]
    visible = (steps < valid_lengths[:, None]).astype(np.float64)
    denom = np.where(valid_lengths > 0, valid_lengths, 1).astype(np.float64)
    return (visible / denom[:, None])[:, :, None]


def reconstruction_loss(x: ArrayLike, x_hat: Tensor, valid_lengths: np.ndarray) -> Tensor:
    """Mean squared error over valid timesteps and features.

    Parameters
    ----------
    x : array-like
        (B, L, F) targets.
    x_hat : Tensor
        (B, L, F) reconstruction.
    valid_lengths : np.ndarray
        (B,) real rows per sequence.

    Returns
    -------
    Tensor
        Scalar. Per sequence: sum of squared errors on the first
        ``valid_length`` rows divided by ``valid_length * F``; the batch
        value is the mean over sequences with ``valid_length > 0`` (0 when
        there are none). Padded rows never contribute.

    Raises
    ------
    ShapeError
        If the shapes of ``x`` and ``x_hat`` differ.
    """
    x = as_tensor(x)
    if x.shape != x_hat.shape or x.ndim != 3:
        raise ShapeError(f"reconstruction shapes differ: {x.shape} vs {x_hat.shape}")
    batch, length, n_features = x.shape
    valid_lengths = np.asarray(valid_lengths, dtype=np.int64)
    n_real = int(np.sum(valid_lengths > 0))
    if n_real == 0:
        return Tensor(0.0)
    weights = reconstruction_mask(valid_lengths, length) / (n_features * n_real)
    diff = x_hat - x
    return T.tsum(diff * diff * weights)


def trace_loss(H: Tensor, indicator: ClusterIndicator) -> Tensor:
    """Spectral relaxation of the k-means objective for one batch.

    With latent rows ``H`` (n x M), Gram ``G = H H^T`` (n x n) and a
    constant orthonormal indicator ``F`` (n x K)::

        loss = Tr(G) - Tr(F^T G F) = ||H||^2 - ||F^T H||^2

    which is the sum of G's eigenvalues outside the span of F, and hence
    non-negative when F holds G's top-K eigenvectors.

    Raises
    ------
    ShapeError
        If ``indicator`` has a different row count than ``H``.

    Examples
    --------
    >>> H = Tensor(np.diag(np.sqrt([5.0, 3.0, 1.0])))
    >>> F = ClusterIndicator(np.eye(3)[:, :2])
    >>> round(trace_loss(H, F).item(), 12)
    1.0
    """
    if H.ndim != 2:
        raise ShapeError(f"H must be 2-D, got shape {H.shape}")
    if indicator.n_sequences != H.shape[0]:
        raise ShapeError(
            f"indicator has {indicator.n_sequences} rows but the batch has {H.shape[0]} sequences"
        )
    projected = T.transpose(H) @ indicator.matrix  # (M, K) = (F^T H)^T
    return T.tsum(H * H) - T.tsum(projected * projected)
