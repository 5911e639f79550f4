"""Engagement classifier over mapped cluster structure.

Every variant ends in ``dense -> ReLU`` of width S (the penultimate
activations matched by the bridge loss) followed by ``dense -> C`` logits.

- ``tm``: two 3x3 stride-1 convolutions (zero padding 1, ReLU) over the
  (1, K, K) transition matrix, flattened.
- ``s``: one LSTM layer over the (S, M) latent rows; its final hidden state.
- ``f``: the length-K frequency histogram directly.
"""

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from seqforge.core.constants import (
    CLASS_NAMES,
    CLASSIFIER_VARIANTS,
    DEFAULT_CONV_CHANNELS,
    DEFAULT_RECURRENT_SIZE,
)
from seqforge.core.exceptions import ShapeError
from seqforge.interpreter.layers import LSTMCell
from seqforge.numerics import tensor as T
from seqforge.numerics.module import Dense, Module, xavier_uniform
from seqforge.numerics.tensor import Tensor


@dataclass
class ClassifierActivations:
    """Outputs of one forward pass.

    Attributes
    ----------
    penultimate : Tensor
        (B, S) post-ReLU activations.
    logits : Tensor
        (B, C).
    probabilities : Tensor
        (B, C) softmax of the logits.
    """

    penultimate: Tensor
    logits: Tensor
    probabilities: Tensor

    def predictions(self) -> np.ndarray:
        return np.argmax(self.probabilities.data, axis=1)


class ClassifierModel(Module):
    """One of the three classifier variants.

    Parameters
    ----------
    variant : str
        "tm", "s" or "f".
    n_clusters : int
        K.
    sequences_per_player : int
        S, also the penultimate width.
    latent_dim : int
        M (used by the "s" variant).
    n_classes : int
        C.
    conv_channels : Sequence[int]
        Output channels of the two "tm" convolutions.
    recurrent_size : int
        Hidden width of the "s" recurrent layer.
    seed : int
        Seed of the weight initialization.
    """

    def __init__(
        self,
        variant: str,
        n_clusters: int,
        sequences_per_player: int,
        latent_dim: int,
        n_classes: int = len(CLASS_NAMES),
        conv_channels: Sequence[int] = DEFAULT_CONV_CHANNELS,
        recurrent_size: int = DEFAULT_RECURRENT_SIZE,
        seed: int = 0,
    ) -> None:
        super().__init__()
        if variant not in CLASSIFIER_VARIANTS:
            raise ValueError(f"variant must be one of {CLASSIFIER_VARIANTS}, got {variant!r}")
        self.variant = variant
        self.n_clusters = n_clusters
        self.sequences_per_player = sequences_per_player
        self.latent_dim = latent_dim
        self.n_classes = n_classes
        rng = np.random.default_rng(seed)
        k = n_clusters

        if variant == "tm":
            c1, c2 = (int(c) for c in conv_channels)
            self.conv1_w = self.add_parameter(
                "conv1.weight", xavier_uniform(rng, 9, 9 * c1, (c1, 1, 3, 3))
            )
            self.conv1_b = self.add_parameter("conv1.bias", np.zeros(c1))
            self.conv2_w = self.add_parameter(
                "conv2.weight", xavier_uniform(rng, 9 * c1, 9 * c2, (c2, c1, 3, 3))
            )
            self.conv2_b = self.add_parameter("conv2.bias", np.zeros(c2))
            features = c2 * k * k
        elif variant == "s":
            self.recurrent = self.add_module("recurrent", LSTMCell(latent_dim, recurrent_size, rng))
            features = recurrent_size
        else:
            features = k

        self.hidden = self.add_module("hidden", Dense(features, sequences_per_player, rng))
        self.head = self.add_module("head", Dense(sequences_per_player, n_classes, rng))
        # untrained head scores every class equally
        self.head.weight.data[...] = 0.0

    def input_shape(self) -> tuple:
        """Expected per-player input shape."""
        k = self.n_clusters
        if self.variant == "tm":
            return (1, k, k)
        if self.variant == "s":
            return (self.sequences_per_player, self.latent_dim)
        return (k,)

    def forward(self, mapped: np.ndarray) -> ClassifierActivations:
        """Run the network on a batch of mapped inputs.

        Parameters
        ----------
        mapped : np.ndarray
            (B, *input_shape()) batch from ``map_inputs``.

        Returns
        -------
        ClassifierActivations
            Penultimate activations, logits and probabilities.

        Raises
        ------
        ShapeError
            If the batch does not match the variant's input shape.
        """
        mapped = np.asarray(mapped, dtype=np.float64)
        if mapped.ndim < 1 or mapped.shape[1:] != self.input_shape():
            raise ShapeError(
                f"{self.variant} classifier expects (B, *{self.input_shape()}), got {mapped.shape}"
            )
        batch = mapped.shape[0]
        x = Tensor(mapped)
        if self.variant == "tm":
            x = T.relu(T.conv2d(x, self.conv1_w, self.conv1_b, padding=1))
            x = T.relu(T.conv2d(x, self.conv2_w, self.conv2_b, padding=1))
            x = T.reshape(x, (batch, -1))
        elif self.variant == "s":
            h = Tensor(np.zeros((batch, self.recurrent.hidden_size)))
            c = Tensor(np.zeros((batch, self.recurrent.hidden_size)))
            for t in range(self.sequences_per_player):
                h, c = self.recurrent(x[:, t, :], h, c)
            x = h
        penultimate = T.relu(self.hidden(x))
        logits = self.head(penultimate)
        return ClassifierActivations(
            penultimate=penultimate, logits=logits, probabilities=T.softmax(logits, axis=1)
        )
