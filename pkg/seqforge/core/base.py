"""Configuration dataclasses for collaborative training.

The on-disk / command-line spelling of a few fields differs from the
Python attribute names (``K``, ``lambda``, ``I``, ``B2``); ``FILE_KEYS``
maps one to the other so config files read naturally.
"""

import hashlib
import json
from dataclasses import asdict, dataclass, field, fields
from typing import Any, Dict, Optional, Tuple

from seqforge.core.constants import (
    CLASSIFIER_VARIANTS,
    DEFAULT_ATTENTION_SIZE,
    DEFAULT_BETA,
    DEFAULT_COLLABORATIVE_EPOCHS,
    DEFAULT_CONV_CHANNELS,
    DEFAULT_HIDDEN_SIZES,
    DEFAULT_INNER_EPOCHS,
    DEFAULT_LAMBDA,
    DEFAULT_LEARNING_RATE,
    DEFAULT_NUM_CLUSTERS,
    DEFAULT_PLAYERS_PER_BATCH,
    DEFAULT_RECURRENT_SIZE,
    DEFAULT_REFRESH_PERIOD,
    DEFAULT_SEED,
    DEFAULT_TRAIN_FRACTION,
    MAX_COLLABORATIVE_EPOCHS,
    MIN_COLLABORATIVE_EPOCHS,
)
from seqforge.core.exceptions import ConfigError
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)

# file/CLI key -> attribute name
FILE_KEYS: Dict[str, str] = {
    "K": "num_clusters",
    "lambda": "lambda_",
    "I": "refresh_period",
    "B2": "players_per_batch",
}
_ATTR_TO_KEY: Dict[str, str] = {v: k for k, v in FILE_KEYS.items()}


@dataclass
class TrainingConfig:
    """All hyperparameters of one collaborative training run.

    Attributes
    ----------
    num_clusters : int
        K, number of behaviour clusters.
    lambda_ : float
        Weight of the trace loss inside the interpreter loss.
    beta : float
        Balance between interpreter losses and the bridge loss, in (0, 1].
    refresh_period : int
        I, interpreter iterations between cluster-indicator refreshes.
    collaborative_epochs : int
        Number of interpreter/cluster/classifier cycles.
    interpreter_inner_epochs : int
        Passes over the training players per interpreter phase.
    classifier_inner_epochs : int
        Passes over the training players per classifier phase.
    players_per_batch : int
        B2; the interpreter batch is the S sequences of each of these players.
    interpreter_lr : float
        Adam step size for interpreter and reducer parameters.
    classifier_lr : float
        Adam step size for classifier parameters.
    seed : int
        Root seed for initialization, batching and k-means.
    variant : str
        Classifier input mapping: "tm", "s" or "f".
    hidden_sizes : Tuple[int, int, int]
        Encoder layer widths (m1, m2, m3); M is their sum.
    attention_size : int
        Width of the additive-attention score layer.
    conv_channels : Tuple[int, int]
        Output channels of the two convolutions of the "tm" classifier.
    recurrent_size : int
        Hidden width of the "s" classifier's recurrent layer.
    train_fraction : float
        Per-class share of players used for training; the rest is held out.
    """

    num_clusters: int = DEFAULT_NUM_CLUSTERS
    lambda_: float = DEFAULT_LAMBDA
    beta: float = DEFAULT_BETA
    refresh_period: int = DEFAULT_REFRESH_PERIOD
    collaborative_epochs: int = DEFAULT_COLLABORATIVE_EPOCHS
    interpreter_inner_epochs: int = DEFAULT_INNER_EPOCHS
    classifier_inner_epochs: int = DEFAULT_INNER_EPOCHS
    players_per_batch: int = DEFAULT_PLAYERS_PER_BATCH
    interpreter_lr: float = DEFAULT_LEARNING_RATE
    classifier_lr: float = DEFAULT_LEARNING_RATE
    seed: int = DEFAULT_SEED
    variant: str = "tm"
    hidden_sizes: Tuple[int, int, int] = DEFAULT_HIDDEN_SIZES
    attention_size: int = DEFAULT_ATTENTION_SIZE
    conv_channels: Tuple[int, int] = DEFAULT_CONV_CHANNELS
    recurrent_size: int = DEFAULT_RECURRENT_SIZE
    train_fraction: float = DEFAULT_TRAIN_FRACTION

    def __post_init__(self) -> None:
        self.hidden_sizes = tuple(int(h) for h in self.hidden_sizes)
        self.conv_channels = tuple(int(c) for c in self.conv_channels)

    @property
    def latent_dim(self) -> int:
        """M, the latent width (sum of encoder layer widths)."""
        return int(sum(self.hidden_sizes))

    def interpreter_batch_size(self, sequences_per_player: int) -> int:
        """B1 = S x B2.

        Parameters
        ----------
        sequences_per_player : int
            S, sequences per player sample.

        Returns
        -------
        int
            Number of sequences in one full interpreter batch.
        """
        return sequences_per_player * self.players_per_batch

    def validate(self) -> "TrainingConfig":
        """Check value ranges.

        Returns
        -------
        TrainingConfig
            self, for chaining.

        Raises
        ------
        ConfigError
            If any field is out of range.
        """
        if not 0.0 < self.beta <= 1.0:
            raise ConfigError(f"beta must be in (0, 1], got {self.beta}")
        if self.lambda_ < 0:
            raise ConfigError(f"lambda must be >= 0, got {self.lambda_}")
        if self.refresh_period < 1:
            raise ConfigError(f"I must be >= 1, got {self.refresh_period}")
        if self.num_clusters < 1:
            raise ConfigError(f"K must be >= 1, got {self.num_clusters}")
        if self.collaborative_epochs < 1:
            raise ConfigError(
                f"collaborative_epochs must be >= 1, got {self.collaborative_epochs}"
            )
        if self.interpreter_inner_epochs < 0 or self.classifier_inner_epochs < 0:
            raise ConfigError("inner epoch counts must be >= 0")
        if self.players_per_batch < 1:
            raise ConfigError(f"B2 must be >= 1, got {self.players_per_batch}")
        if self.interpreter_lr <= 0 or self.classifier_lr <= 0:
            raise ConfigError("learning rates must be > 0")
        if self.variant not in CLASSIFIER_VARIANTS:
            raise ConfigError(
                f"variant must be one of {CLASSIFIER_VARIANTS}, got {self.variant!r}"
            )
        if len(self.hidden_sizes) != 3 or min(self.hidden_sizes) < 1:
            raise ConfigError(f"hidden_sizes must be 3 positive ints, got {self.hidden_sizes}")
        if len(self.conv_channels) != 2 or min(self.conv_channels) < 1:
            raise ConfigError(f"conv_channels must be 2 positive ints, got {self.conv_channels}")
        if self.attention_size < 1 or self.recurrent_size < 1:
            raise ConfigError("attention_size and recurrent_size must be >= 1")
        if not 0.0 < self.train_fraction <= 1.0:
            raise ConfigError(f"train_fraction must be in (0, 1], got {self.train_fraction}")
        if not MIN_COLLABORATIVE_EPOCHS <= self.collaborative_epochs <= MAX_COLLABORATIVE_EPOCHS:
            logger.debug(
                f"collaborative_epochs={self.collaborative_epochs} outside the usual "
                f"{MIN_COLLABORATIVE_EPOCHS}-{MAX_COLLABORATIVE_EPOCHS} range"
            )
        return self

    def to_dict(self) -> Dict[str, Any]:
        """Serialize using file keys (``K``, ``lambda``, ``I``, ``B2``).

        Returns
        -------
        Dict[str, Any]
            Flat, JSON/YAML-friendly mapping.
        """
        out: Dict[str, Any] = {}
        for name, value in asdict(self).items():
            if isinstance(value, tuple):
                value = list(value)
            out[_ATTR_TO_KEY.get(name, name)] = value
        return out

    @classmethod
    def from_dict(cls, values: Dict[str, Any]) -> "TrainingConfig":
        """Build a config from a flat mapping.

        Parameters
        ----------
        values : Dict[str, Any]
            Keys may use either file spelling or attribute names.
            ``None`` values are ignored (defaults apply).

        Returns
        -------
        TrainingConfig
            Unvalidated config.

        Raises
        ------
        ConfigError
            If an unknown key is present.
        """
        known = {f.name: f for f in fields(cls)}
        kwargs: Dict[str, Any] = {}
        for key, value in values.items():
            name = FILE_KEYS.get(key, key)
            if name not in known:
                raise ConfigError(f"unknown config key: {key!r}")
            if value is None:
                continue
            if name in ("hidden_sizes", "conv_channels"):
                value = tuple(int(v) for v in value)
            elif known[name].type in (int, "int"):
                value = int(value)
            elif known[name].type in (float, "float"):
                value = float(value)
            kwargs[name] = value
        return cls(**kwargs)

    def replace(self, **overrides: Any) -> "TrainingConfig":
        """Copy with overrides (file keys or attribute names)."""
        merged = self.to_dict()
        merged.update(overrides)
        return TrainingConfig.from_dict(merged)

    def config_hash(self) -> str:
        """Stable short hash of the resolved config."""
        payload = json.dumps(self.to_dict(), sort_keys=True).encode("utf-8")
        return hashlib.sha256(payload).hexdigest()[:16]
