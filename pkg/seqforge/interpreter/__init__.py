"""Interpreter package: the sequence autoencoder and its losses."""

from seqforge.interpreter.layers import AdditiveAttention, LSTMCell, attention_mask
from seqforge.interpreter.losses import reconstruction_loss, trace_loss
from seqforge.interpreter.model import EncoderOutputs, InterpreterModel, LatentBatch

__all__ = [
    "LSTMCell",
    "AdditiveAttention",
    "attention_mask",
    "InterpreterModel",
    "EncoderOutputs",
    "LatentBatch",
    "reconstruction_loss",
    "trace_loss",
]
