"""Classifier package: input mappings, network variants and CCE loss."""

from seqforge.classifier.losses import cce_loss
from seqforge.classifier.mapping import (
    TransitionMatrix,
    build_adjacency,
    map_frequency,
    map_inputs,
    map_sequential,
)
from seqforge.classifier.model import ClassifierActivations, ClassifierModel

__all__ = [
    "TransitionMatrix",
    "build_adjacency",
    "map_sequential",
    "map_frequency",
    "map_inputs",
    "ClassifierModel",
    "ClassifierActivations",
    "cce_loss",
]
