"""Recurrent cell and attention layers for the sequence autoencoder."""

from typing import Tuple

import numpy as np

from seqforge.core.constants import MASK_FILL
from seqforge.numerics import tensor as T
from seqforge.numerics.module import Module, xavier_uniform
from seqforge.numerics.tensor import Tensor


class LSTMCell(Module):
    """Gated memory cell.

    Gate pre-activations are ``x @ w_x + h @ w_h + bias`` split into input,
    forget, candidate and output blocks of ``hidden_size`` columns each::

        c' = sigmoid(f) * c + sigmoid(i) * tanh(g)
        h' = sigmoid(o) * tanh(c')

    The forget-gate bias starts at 1.
    """

    def __init__(self, input_size: int, hidden_size: int, rng: np.random.Generator) -> None:
        super().__init__()
        self.input_size = input_size
        self.hidden_size = hidden_size
        n = hidden_size
        self.w_x = self.add_parameter("w_x", xavier_uniform(rng, input_size, 4 * n))
        self.w_h = self.add_parameter("w_h", xavier_uniform(rng, n, 4 * n))
        bias = np.zeros(4 * n)
        bias[n : 2 * n] = 1.0
        self.bias = self.add_parameter("bias", bias)

    def __call__(self, x: Tensor, h: Tensor, c: Tensor) -> Tuple[Tensor, Tensor]:
        n = self.hidden_size
        z = x @ self.w_x + h @ self.w_h + self.bias
        i = T.sigmoid(z[:, 0:n])
        f = T.sigmoid(z[:, n : 2 * n])
        g = T.tanh(z[:, 2 * n : 3 * n])
        o = T.sigmoid(z[:, 3 * n : 4 * n])
        c_next = f * c + i * g
        h_next = o * T.tanh(c_next)
        return h_next, c_next


class AdditiveAttention(Module):
    """Learned two-layer attention score ``v^T tanh(keys @ w_k + query @ w_q)``.

    Parameters
    ----------
    key_size : int
        Width of the attended sequence.
    query_size : int
        Width of the decoder state issuing the query.
    attention_size : int
        Width of the hidden score layer.
    """

    def __init__(
        self, key_size: int, query_size: int, attention_size: int, rng: np.random.Generator
    ) -> None:
        super().__init__()
        self.w_k = self.add_parameter("w_k", xavier_uniform(rng, key_size, attention_size))
        self.w_q = self.add_parameter("w_q", xavier_uniform(rng, query_size, attention_size))
        self.v = self.add_parameter("v", xavier_uniform(rng, attention_size, 1))

    def project_keys(self, keys: Tensor) -> Tensor:
        """(B, L, key_size) -> (B, L, attention_size); reused for every query."""
        return keys @ self.w_k

    def __call__(
        self, keys: Tensor, projected_keys: Tensor, query: Tensor, mask_bias: np.ndarray
    ) -> Tuple[Tensor, Tensor]:
        """Attend over ``keys``.

        Parameters
        ----------
        keys : Tensor
            (B, L, key_size) attended sequence.
        projected_keys : Tensor
            ``project_keys(keys)``.
        query : Tensor
            (B, query_size).
        mask_bias : np.ndarray
            (B, L) additive score bias: 0 on attendable steps, ``MASK_FILL``
            elsewhere.

        Returns
        -------
        Tuple[Tensor, Tensor]
            Context (B, key_size) and weights (B, L).
        """
        batch, length = mask_bias.shape
        q = query @ self.w_q
        hidden = T.tanh(projected_keys + T.reshape(q, (batch, 1, q.shape[-1])))
        scores = T.reshape(hidden @ self.v, (batch, length)) + mask_bias
        weights = T.softmax(scores, axis=1)
        context = T.tsum(keys * T.reshape(weights, (batch, length, 1)), axis=1)
        return context, weights


def attention_mask(valid_lengths: np.ndarray, length: int) -> np.ndarray:
    """Additive bias exposing steps ``t < max(valid_length, 1)``.

    Empty sequences expose their first (all-zero) step so every softmax
    has at least one finite score.
    """
    visible = np.maximum(np.asarray(valid_lengths), 1)
    steps = np.arange(length)[None, :]
    return np.where(steps < visible[:, None], 0.0, MASK_FILL)
