"""Core package initialization."""

from seqforge.core.base import FILE_KEYS, TrainingConfig
from seqforge.core.constants import (
    CLASS_NAMES,
    CLASSIFIER_VARIANTS,
    DEFAULT_BETA,
    DEFAULT_LAMBDA,
    DEFAULT_NUM_CLUSTERS,
    DEFAULT_REFRESH_PERIOD,
    DEFAULT_SEED,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_RUNTIME_FAILURE,
    SEED_ENV_VAR,
)
from seqforge.core.exceptions import (
    CheckpointError,
    ConfigError,
    DataFormatError,
    DivergenceError,
    NonFiniteLossError,
    SeqforgeError,
    ShapeError,
)

__all__ = [
    # Constants
    "CLASS_NAMES",
    "CLASSIFIER_VARIANTS",
    "DEFAULT_BETA",
    "DEFAULT_LAMBDA",
    "DEFAULT_NUM_CLUSTERS",
    "DEFAULT_REFRESH_PERIOD",
    "DEFAULT_SEED",
    "EXIT_OK",
    "EXIT_RUNTIME_FAILURE",
    "EXIT_INVALID_INPUT",
    "SEED_ENV_VAR",
    # Config
    "FILE_KEYS",
    "TrainingConfig",
    # Exceptions
    "SeqforgeError",
    "ConfigError",
    "DataFormatError",
    "ShapeError",
    "NonFiniteLossError",
    "DivergenceError",
    "CheckpointError",
]
