"""Framework constants.

Defaults for the collaborative training loop, numerical tolerances and
the names of files written into run directories.
"""

# Engagement classes (label order defines the class index)
CLASS_NAMES: tuple = ("Sustainer", "Burnout", "Churnout")

# Collaborative training defaults
DEFAULT_NUM_CLUSTERS: int = 7  # K
DEFAULT_LAMBDA: float = 0.5  # trace-loss weight inside the interpreter loss
DEFAULT_BETA: float = 0.3  # interpreter-vs-bridge balance
DEFAULT_REFRESH_PERIOD: int = 10  # I, interpreter iterations between F updates
DEFAULT_COLLABORATIVE_EPOCHS: int = 8
MIN_COLLABORATIVE_EPOCHS: int = 5
MAX_COLLABORATIVE_EPOCHS: int = 10
DEFAULT_INNER_EPOCHS: int = 60
DEFAULT_PLAYERS_PER_BATCH: int = 8  # B2
DEFAULT_LEARNING_RATE: float = 1e-3
DEFAULT_SEED: int = 42
DEFAULT_TRAIN_FRACTION: float = 0.8

# Interpreter architecture
DEFAULT_HIDDEN_SIZES: tuple = (64, 32, 16)  # M = 112
DEFAULT_ATTENTION_SIZE: int = 16

# Classifier architecture
CLASSIFIER_VARIANTS: tuple = ("tm", "s", "f")
DEFAULT_CONV_CHANNELS: tuple = (8, 8)
DEFAULT_RECURRENT_SIZE: int = 32

# Numerical tolerances
ORTHONORMAL_TOL: float = 1e-8
SYMMETRY_TOL: float = 1e-8
ZERO_NORM_TOL: float = 1e-12
PROBABILITY_FLOOR: float = 1e-12
MASK_FILL: float = -1e9  # additive score for masked attention positions

# k-means
KMEANS_MAX_ITER: int = 300

# Data
PAD_PERCENTILE: float = 95.0
SWEEP_RUNS_PER_CELL: int = 5
SATURATION_WINDOW: int = 3
SATURATION_TOLERANCE: float = 0.05

# Run directory layout
MANIFEST_FILE: str = "manifest.json"
DERIVED_MANIFEST_SUFFIX: str = ".manifest.json"  # <command>.manifest.json beside derived files
LOSS_HISTORY_FILE: str = "loss_history.csv"
METRICS_FILE: str = "metrics.csv"
CONFUSION_FILE: str = "confusion.csv"
ENTROPY_FILE: str = "entropy_trace.csv"
PLAYER_ENTROPY_FILE: str = "player_entropy.csv"
EMBEDDINGS_FILE: str = "embeddings.csv"
PROFILES_FILE: str = "cluster_profiles.csv"
TRANSITIONS_FILE: str = "class_transitions.csv"
SWEEP_SUMMARY_FILE: str = "sweep_summary.csv"
CHECKPOINT_DIR: str = "checkpoints"
FINAL_CHECKPOINT: str = "final"
CHECKPOINT_META: str = "meta.json"
SPEC_SIDECAR: str = "spec.json"
SCHEMA_SIDECAR: str = "schema.json"

# Environment
SEED_ENV_VAR: str = "SEQFORGE_SEED"

# CLI exit codes
EXIT_OK: int = 0
EXIT_RUNTIME_FAILURE: int = 1
EXIT_INVALID_INPUT: int = 2
