"""Stacked recurrent autoencoder producing one latent vector per sequence.

The encoder runs three LSTM layers of widths (m1, m2, m3). A sequence's
latent representation is the concatenation of every layer's hidden state
at the last valid timestep, so M = m1 + m2 + m3.

The decoder mirrors the stack (widths m3, m2, m1) and is initialized from
the matching encoder layers' final states. At each of the L steps, every
decoder layer receives the output of the layer below (the previous
reconstruction for the first layer), the latent vector and an attention
context over the matching encoder layer's outputs. Targets are never fed
to the decoder.
"""

from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np

from seqforge.core.constants import DEFAULT_ATTENTION_SIZE, DEFAULT_HIDDEN_SIZES
from seqforge.core.exceptions import ShapeError
from seqforge.interpreter.layers import AdditiveAttention, LSTMCell, attention_mask
from seqforge.numerics import tensor as T
from seqforge.numerics.module import Dense, Module
from seqforge.numerics.tensor import Tensor


@dataclass
class EncoderOutputs:
    """Per-layer encoder activations needed by the decoder.

    Attributes
    ----------
    outputs : List[Tensor]
        Hidden states of each encoder layer, (B, L, m_l).
    final_states : List[Tuple[Tensor, Tensor]]
        (h, c) of each layer at the last valid timestep, (B, m_l) each.
    mask_bias : np.ndarray
        (B, L) additive attention bias.
    valid_lengths : np.ndarray
        (B,) real rows per sequence.
    """

    outputs: List[Tensor]
    final_states: List[Tuple[Tensor, Tensor]]
    mask_bias: np.ndarray
    valid_lengths: np.ndarray

    @property
    def pad_length(self) -> int:
        return int(self.mask_bias.shape[1])


@dataclass
class LatentBatch:
    """Latent representations of a batch of sequences.

    Attributes
    ----------
    H : Tensor
        (B1, M) latent rows.
    sequence_ids : np.ndarray
        (B1, 2) rows of (player row, position in sample).
    """

    H: Tensor
    sequence_ids: np.ndarray

    @property
    def size(self) -> int:
        return int(self.H.shape[0])


def last_step_selector(valid_lengths: np.ndarray, length: int) -> np.ndarray:
    """(B, L, 1) one-hot of the last valid step (step 0 for empty sequences)."""
    last = np.maximum(np.asarray(valid_lengths, dtype=np.int64) - 1, 0)
    selector = np.zeros((last.size, length, 1))
    selector[np.arange(last.size), last, 0] = 1.0
    return selector


class InterpreterModel(Module):
    """Encoder-decoder over (B, L, F) batches of padded sequences.

    Parameters
    ----------
    n_features : int
        F, encoder input and decoder output width.
    hidden_sizes : Sequence[int]
        Encoder layer widths (m1, m2, m3).
    attention_size : int
        Hidden width of every attention score layer.
    seed : int
        Seed of the weight initialization.
    """

    def __init__(
        self,
        n_features: int,
        hidden_sizes: Sequence[int] = DEFAULT_HIDDEN_SIZES,
        attention_size: int = DEFAULT_ATTENTION_SIZE,
        seed: int = 0,
    ) -> None:
        super().__init__()
        if n_features < 1:
            raise ValueError(f"n_features must be >= 1, got {n_features}")
        self.n_features = n_features
        self.hidden_sizes = tuple(int(h) for h in hidden_sizes)
        self.attention_size = attention_size
        rng = np.random.default_rng(seed)

        widths = (n_features,) + self.hidden_sizes
        self.encoder_cells: List[LSTMCell] = [
            self.add_module(f"encoder.{i}", LSTMCell(widths[i], widths[i + 1], rng))
            for i in range(len(self.hidden_sizes))
        ]

        latent = self.latent_dim
        mirrored = self.hidden_sizes[::-1]
        self.decoder_cells: List[LSTMCell] = []
        self.attentions: List[AdditiveAttention] = []
        below = n_features
        for i, size in enumerate(mirrored):
            # layer i reads [below, latent, context]; context width = size
            self.decoder_cells.append(
                self.add_module(f"decoder.{i}", LSTMCell(below + latent + size, size, rng))
            )
            self.attentions.append(
                self.add_module(f"attention.{i}", AdditiveAttention(size, size, attention_size, rng))
            )
            below = size
        self.output = self.add_module("output", Dense(mirrored[-1], n_features, rng))

    @property
    def latent_dim(self) -> int:
        """M."""
        return int(sum(self.hidden_sizes))

    # ------------------------------------------------------------------

    def encode(
        self,
        x: np.ndarray,
        valid_lengths: np.ndarray,
        sequence_ids: Optional[np.ndarray] = None,
    ) -> Tuple[LatentBatch, EncoderOutputs]:
        """Encode a padded batch.

        Parameters
        ----------
        x : np.ndarray
            (B1, L, F) padded, normalized sequences.
        valid_lengths : np.ndarray
            (B1,) real rows per sequence.
        sequence_ids : Optional[np.ndarray]
            (B1, 2) row provenance; defaults to (row, 0).

        Returns
        -------
        Tuple[LatentBatch, EncoderOutputs]
            Latent rows (B1, M) and the activations the decoder attends to.

        Raises
        ------
        ShapeError
            If ``x`` is not (B1, L, F) or lengths disagree.
        """
        x = np.asarray(x, dtype=np.float64)
        if x.ndim != 3 or x.shape[2] != self.n_features:
            raise ShapeError(f"expected (B, L, {self.n_features}) input, got {x.shape}")
        batch, length = x.shape[0], x.shape[1]
        valid_lengths = np.asarray(valid_lengths, dtype=np.int64)
        if valid_lengths.shape != (batch,):
            raise ShapeError(f"valid_lengths must have shape ({batch},), got {valid_lengths.shape}")
        selector = last_step_selector(valid_lengths, length)

        inputs: List[Tensor] = [Tensor(x[:, t, :]) for t in range(length)]
        outputs: List[Tensor] = []
        final_states: List[Tuple[Tensor, Tensor]] = []
        for cell in self.encoder_cells:
            h = Tensor(np.zeros((batch, cell.hidden_size)))
            c = Tensor(np.zeros((batch, cell.hidden_size)))
            hs, cs = [], []
            for t in range(length):
                h, c = cell(inputs[t], h, c)
                hs.append(h)
                cs.append(c)
            layer_h = T.stack(hs, axis=1)
            layer_c = T.stack(cs, axis=1)
            outputs.append(layer_h)
            final_states.append(
                (T.tsum(layer_h * selector, axis=1), T.tsum(layer_c * selector, axis=1))
            )
            inputs = hs

        H = T.concat([h for h, _ in final_states], axis=1)
        if sequence_ids is None:
            sequence_ids = np.stack([np.arange(batch), np.zeros(batch, dtype=np.int64)], axis=1)
        latent = LatentBatch(H=H, sequence_ids=np.asarray(sequence_ids, dtype=np.int64))
        encoded = EncoderOutputs(
            outputs=outputs,
            final_states=final_states,
            mask_bias=attention_mask(valid_lengths, length),
            valid_lengths=valid_lengths,
        )
        return latent, encoded

    def decode(self, latent: LatentBatch, encoded: EncoderOutputs) -> Tensor:
        """Autoregressively reconstruct (B1, L, F) from the latent rows.

        Raises
        ------
        ShapeError
            If latent and encoder batch sizes differ.
        """
        batch = latent.size
        if encoded.mask_bias.shape[0] != batch:
            raise ShapeError(
                f"latent batch {batch} does not match encoder batch {encoded.mask_bias.shape[0]}"
            )
        length = encoded.pad_length
        depth = len(self.decoder_cells)
        keys = [encoded.outputs[depth - 1 - i] for i in range(depth)]
        projected = [attn.project_keys(k) for attn, k in zip(self.attentions, keys)]
        states = [encoded.final_states[depth - 1 - i] for i in range(depth)]

        previous: Tensor = Tensor(np.zeros((batch, self.n_features)))
        steps: List[Tensor] = []
        for _ in range(length):
            below = previous
            for i, cell in enumerate(self.decoder_cells):
                h, c = states[i]
                context, _ = self.attentions[i](keys[i], projected[i], h, encoded.mask_bias)
                h, c = cell(T.concat([below, latent.H, context], axis=1), h, c)
                states[i] = (h, c)
                below = h
            previous = self.output(below)
            steps.append(previous)
        return T.stack(steps, axis=1)

    def forward(
        self,
        x: np.ndarray,
        valid_lengths: np.ndarray,
        sequence_ids: Optional[np.ndarray] = None,
    ) -> Tuple[LatentBatch, Tensor]:
        """Encode then decode; returns (latent rows, reconstruction)."""
        latent, encoded = self.encode(x, valid_lengths, sequence_ids)
        return latent, self.decode(latent, encoded)

    def embed(self, x: np.ndarray, valid_lengths: np.ndarray) -> np.ndarray:
        """Latent rows as a plain array (no decoder pass)."""
        latent, _ = self.encode(x, valid_lengths)
        return latent.H.data.copy()
