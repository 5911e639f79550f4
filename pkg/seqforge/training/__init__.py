"""Training package: collaborative loop, ablation, sweeps and checkpoints."""

from seqforge.training.ablation import AblationResult, run_ablation
from seqforge.training.checkpoint import Checkpoint, load_checkpoint, save_checkpoint
from seqforge.training.sweep import expand_grid, load_grid, sweep
from seqforge.training.trainer import (
    CollaborativeTrainer,
    LossHistory,
    LossRecord,
    TrainState,
    collaborative_train,
    embed_players,
    predict_players,
    primary_report,
    restore_trainer,
    score_trainer,
)

__all__ = [
    "CollaborativeTrainer",
    "LossHistory",
    "LossRecord",
    "TrainState",
    "collaborative_train",
    "embed_players",
    "predict_players",
    "score_trainer",
    "restore_trainer",
    "primary_report",
    "AblationResult",
    "run_ablation",
    "load_grid",
    "expand_grid",
    "sweep",
    "Checkpoint",
    "save_checkpoint",
    "load_checkpoint",
]
