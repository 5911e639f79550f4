"""Per-player similarity structure that ties the interpreter to the classifier.

For one player with latent rows H_U (S x M):

- MAG is the (S x S) cosine-similarity matrix of the rows.
- SIGN is +1 for pairs of sequences in different clusters and -1
  otherwise (diagonal included): similarity across clusters is penalized
  and similarity within a cluster rewarded. Padding sequences
  are masked to 0.
- IRL = MAG * SIGN, elementwise.
- A learned weight vector scores every IRL row; a softmax over the S
  scores gives the reduced vector matched against the classifier's
  penultimate activations.
"""

from dataclasses import dataclass

import numpy as np

from seqforge.core.constants import ZERO_NORM_TOL
from seqforge.core.exceptions import ShapeError
from seqforge.numerics import tensor as T
from seqforge.numerics.module import Module, xavier_uniform
from seqforge.numerics.tensor import Tensor


@dataclass
class BridgeTensors:
    """Intermediate bridge quantities for one player.

    Attributes
    ----------
    magnitude : Tensor
        (S, S) MAG.
    sign : np.ndarray
        (S, S) SIGN, constant.
    irl : Tensor
        (S, S) MAG * SIGN.
    reduced : Tensor
        (S,) softmax-reduced IRL.
    """

    magnitude: Tensor
    sign: np.ndarray
    irl: Tensor
    reduced: Tensor


def magnitude(H_U: Tensor) -> Tensor:
    """Cosine similarity between every pair of rows of ``H_U``.

    Rows with norm below 1e-12 have similarity 0 to every other row; every
    diagonal entry is exactly 1.

    Examples
    --------
    >>> magnitude(Tensor(np.eye(3))).data
    array([[1., 0., 0.],
           [0., 1., 0.],
           [0., 0., 1.]])
    """
    if H_U.ndim != 2:
        raise ShapeError(f"H_U must be (S, M), got shape {H_U.shape}")
    s = H_U.shape[0]
    squared = T.tsum(H_U * H_U, axis=1, keepdims=True)
    nonzero = (squared.data > ZERO_NORM_TOL**2).astype(np.float64)
    norms = T.sqrt(squared * nonzero + (1.0 - nonzero))
    unit = H_U / norms * nonzero
    eye = np.eye(s)
    return (unit @ T.transpose(unit)) * (1.0 - eye) + eye


def sign_matrix(cluster_ids: np.ndarray) -> np.ndarray:
    """+1 where cluster ids differ, -1 where they match (diagonal included).

    Padding sequences carry id -1 and belong to no cluster; their rows and
    columns are 0, so they add nothing to IRL.

    Examples
    --------
    >>> sign_matrix(np.array([1, 1, 2]))
    array([[-1., -1.,  1.],
           [-1., -1.,  1.],
           [ 1.,  1., -1.]])
    >>> sign_matrix(np.array([0, -1]))
    array([[-1.,  0.],
           [ 0.,  0.]])
    """
    ids = np.asarray(cluster_ids)
    sign = np.where(ids[:, None] != ids[None, :], 1.0, -1.0)
    real = ids >= 0
    return np.where(real[:, None] & real[None, :], sign, 0.0)


def irl_matrix(mag: Tensor, sign: np.ndarray) -> Tensor:
    """Elementwise product MAG * SIGN."""
    if tuple(mag.shape) != np.shape(sign):
        raise ShapeError(f"MAG {mag.shape} and SIGN {np.shape(sign)} differ")
    return mag * sign


class Reducer(Module):
    """Shared length-S row score feeding the reduction softmax.

    Trained with the interpreter; frozen during the classifier phase.
    """

    def __init__(self, sequences_per_player: int, rng: np.random.Generator) -> None:
        super().__init__()
        self.sequences_per_player = sequences_per_player
        self.weight = self.add_parameter(
            "weight", xavier_uniform(rng, sequences_per_player, 1)
        )


def reduce_irl(irl: Tensor, weights: Tensor) -> Tensor:
    """Softmax over the S row scores ``irl @ weights``.

    Parameters
    ----------
    irl : Tensor
        (S, S).
    weights : Tensor
        (S, 1) reducer weights.

    Returns
    -------
    Tensor
        (S,) entries in (0, 1) summing to 1.
    """
    s = irl.shape[0]
    if irl.shape != (s, s) or weights.shape != (s, 1):
        raise ShapeError(f"reduce_irl needs (S, S) and (S, 1), got {irl.shape} and {weights.shape}")
    scores = T.reshape(irl @ weights, (s,))
    return T.softmax(scores, axis=0)


def bridge_tensors(H_U: Tensor, cluster_ids: np.ndarray, reducer: Reducer) -> BridgeTensors:
    """Compute MAG, SIGN, IRL and the reduced vector for one player."""
    mag = magnitude(H_U)
    sign = sign_matrix(cluster_ids)
    irl = irl_matrix(mag, sign)
    return BridgeTensors(
        magnitude=mag, sign=sign, irl=irl, reduced=reduce_irl(irl, reducer.weight)
    )
