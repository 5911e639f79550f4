"""Disconnected baseline: interpreter and classifier trained without the bridge.

The interpreter is trained on reconstruction and trace loss alone, frozen,
clustered once, and then the classifier is trained on the resulting
inputs. The classifier run is performed twice from the same seeded
initialization; with nothing flowing back from the classifier the two
cross-entropy trajectories are identical.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Union

from seqforge.core.base import TrainingConfig
from seqforge.core.constants import FINAL_CHECKPOINT
from seqforge.data.dataset import PreparedDataset
from seqforge.training.trainer import CollaborativeTrainer, TrainState
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)

ABLATION_RUNS = 2


@dataclass
class AblationResult:
    """Outcome of ``run_ablation``.

    Attributes
    ----------
    trainer : CollaborativeTrainer
        Holds the frozen interpreter and the classifier of the last run.
    cce_runs : List[List[float]]
        Per-inner-epoch cross-entropy of each classifier run.
    """

    trainer: CollaborativeTrainer
    cce_runs: List[List[float]] = field(default_factory=list)

    @property
    def state(self) -> TrainState:
        return self.trainer.state

    @property
    def repeats_identically(self) -> bool:
        """True when every classifier run produced the same trajectory."""
        return all(run == self.cce_runs[0] for run in self.cce_runs[1:])


def run_ablation(
    prepared: PreparedDataset,
    config: TrainingConfig,
    out_dir: Optional[Union[str, Path]] = None,
    runs: int = ABLATION_RUNS,
) -> AblationResult:
    """Train the disconnected baseline.

    Parameters
    ----------
    prepared : PreparedDataset
        Output of ``prepare_dataset``.
    config : TrainingConfig
        Same hyperparameters as the full run; ``collaborative_epochs``
        interpreter phases are run back to back, all without the bridge.
    out_dir : Optional[Union[str, Path]]
        When given, the final checkpoint is written below it.
    runs : int
        Number of repeated classifier runs.

    Returns
    -------
    AblationResult
        The trainer (for predictions) and each run's CCE trajectory.
    """
    trainer = CollaborativeTrainer(prepared, config, out_dir)
    epochs = config.collaborative_epochs
    for epoch in range(1, epochs + 1):
        trainer.state.collaborative_epoch = epoch
        trainer.interpreter_phase(epoch, use_bridge=False)
    trainer.cluster_phase(epochs)

    result = AblationResult(trainer=trainer)
    for run in range(1, runs + 1):
        trainer.reset_classifier()
        phase = f"ablation_run{run}"
        trainer.classifier_phase(epochs, phase=phase)
        result.cce_runs.append(trainer.state.history.values(phase, "cce"))

    trainer.save(FINAL_CHECKPOINT)
    logger.info(
        f"Ablation finished: {runs} classifier runs, "
        f"trajectories {'identical' if result.repeats_identically else 'differ'}"
    )
    return result
