"""seqforge: collaborative interpreter/classifier training on sequences of sequences.

An unsupervised interpreter embeds each game sequence of a player into a
latent vector, k-means turns the latents into cluster ids, and a supervised
classifier predicts the player's engagement class from the cluster
sequence. The two learners take turns; an inverse-reinforcement bridge
lets the classifier's view of the data shape the interpreter's latent space.
"""

__version__ = "0.1.0"

from seqforge.core.base import TrainingConfig
from seqforge.core.constants import CLASS_NAMES
from seqforge.core.exceptions import (
    CheckpointError,
    ConfigError,
    DataFormatError,
    DivergenceError,
    SeqforgeError,
)

__all__ = [
    "TrainingConfig",
    "CLASS_NAMES",
    "SeqforgeError",
    "ConfigError",
    "DataFormatError",
    "DivergenceError",
    "CheckpointError",
]
