"""Alternating collaborative training of interpreter and classifier.

One collaborative epoch runs three phases:

1. **interpreter** - ``interpreter_inner_epochs`` passes over the training
   players minimizing ``beta * (recon + lambda/2 * trace) + (1 - beta) * bridge``
   with the classifier frozen. The first collaborative epoch omits the
   bridge term (``beta`` is effectively 1). The cluster indicators of all
   batches are refreshed every ``I`` interpreter iterations.
2. **cluster** - k-means over the training players' real latent rows fixes
   the cluster id of every sequence for the rest of the epoch.
3. **classifier** - ``classifier_inner_epochs`` passes minimizing the
   cross-entropy on the mapped inputs with the interpreter frozen.

All randomness derives from ``config.seed``: interpreter weights use
``seed``, classifier weights ``seed + 1``, the reducer ``seed + 2``, the
interpreter batch order ``seed + 3``, the classifier batch order
``seed + 4`` and k-means ``seed + 1000 * epoch``.
"""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, Iterator, List, Optional, Sequence, Tuple, Union

import numpy as np

from seqforge.bridge.irl import Reducer, bridge_tensors
from seqforge.bridge.losses import bridge_loss, interpreter_total_loss
from seqforge.classifier.losses import cce_loss
from seqforge.classifier.mapping import map_inputs
from seqforge.classifier.model import ClassifierModel
from seqforge.core.base import TrainingConfig
from seqforge.core.constants import (
    CHECKPOINT_DIR,
    CLASS_NAMES,
    FINAL_CHECKPOINT,
    SATURATION_TOLERANCE,
    SATURATION_WINDOW,
)
from seqforge.core.exceptions import CheckpointError, ConfigError, DivergenceError
from seqforge.data.dataset import PlayerSample, PreparedDataset, prepare_dataset
from seqforge.data.schema import FeatureSchema, NormalizationStats
from seqforge.evaluation.entropy import EntropyTrace, player_entropies
from seqforge.evaluation.metrics import MetricsReport, precision_recall
from seqforge.interpreter.losses import reconstruction_loss, trace_loss
from seqforge.interpreter.model import InterpreterModel
from seqforge.numerics import tensor as T
from seqforge.numerics.kmeans import ClusterModel, kmeans
from seqforge.numerics.linalg import ClusterIndicator, top_k_eigenvectors
from seqforge.numerics.optim import Adam
from seqforge.training.checkpoint import load_checkpoint, save_checkpoint
from seqforge.utils.logging import get_logger, get_phase_logger

logger = get_logger(__name__)

INTERPRETER_PHASE = "interpreter"
CLUSTER_PHASE = "cluster"
CLASSIFIER_PHASE = "classifier"
KMEANS_SEED_STRIDE = 1000


# =============================================================================
# State
# =============================================================================


@dataclass(frozen=True)
class LossRecord:
    """One row of the loss history."""

    epoch: int
    phase: str
    loss_name: str
    value: float


class LossHistory:
    """Append-only loss log in recording order."""

    def __init__(self) -> None:
        self._records: List[LossRecord] = []

    def append(self, epoch: int, phase: str, loss_name: str, value: float) -> None:
        self._records.append(LossRecord(int(epoch), phase, loss_name, float(value)))

    def values(
        self, phase: str, loss_name: str, epoch: Optional[int] = None
    ) -> List[float]:
        """Values of one loss in recording order, optionally for one epoch."""
        return [
            r.value
            for r in self._records
            if r.phase == phase
            and r.loss_name == loss_name
            and (epoch is None or r.epoch == epoch)
        ]

    def to_list(self) -> List[List[Any]]:
        return [[r.epoch, r.phase, r.loss_name, r.value] for r in self._records]

    @classmethod
    def from_list(cls, rows: List[List[Any]]) -> "LossHistory":
        history = cls()
        for epoch, phase, name, value in rows:
            history.append(epoch, phase, name, value)
        return history

    def __iter__(self) -> Iterator[LossRecord]:
        return iter(self._records)

    def __len__(self) -> int:
        return len(self._records)


@dataclass
class TrainState:
    """Mutable bookkeeping of a training run.

    Attributes
    ----------
    collaborative_epoch : int
        Last completed (or running) collaborative epoch, 1-based.
    history : LossHistory
        Per-inner-epoch loss means.
    indicators : List[ClusterIndicator]
        Current cluster indicator of each interpreter batch.
    cluster_model : Optional[ClusterModel]
        k-means fit of the latest cluster phase.
    cluster_ids : Optional[np.ndarray]
        (N, S) cluster id per sequence, -1 for padded sequences.
    latents : Optional[np.ndarray]
        (N, S, M) latent rows from the latest cluster phase.
    entropy : EntropyTrace
        Per-player adjacency entropy after each cluster phase.
    refresh_iterations : List[int]
        Interpreter iterations (counted across the run) at which the
        indicators were recomputed.
    interpreter_iterations : int
        Interpreter gradient steps taken so far.
    checkpoints : List[str]
        Checkpoint directories written, oldest first.
    """

    collaborative_epoch: int = 0
    history: LossHistory = field(default_factory=LossHistory)
    indicators: List[ClusterIndicator] = field(default_factory=list)
    cluster_model: Optional[ClusterModel] = None
    cluster_ids: Optional[np.ndarray] = None
    latents: Optional[np.ndarray] = None
    entropy: EntropyTrace = field(default_factory=EntropyTrace)
    refresh_iterations: List[int] = field(default_factory=list)
    interpreter_iterations: int = 0
    checkpoints: List[str] = field(default_factory=list)

    @property
    def last_checkpoint(self) -> Optional[str]:
        return self.checkpoints[-1] if self.checkpoints else None

    def bridge_per_epoch(self) -> List[float]:
        """Bridge loss at the end of each collaborative epoch where it was active."""
        values = []
        for epoch in range(1, self.collaborative_epoch + 1):
            per_epoch = self.history.values(INTERPRETER_PHASE, "bridge", epoch)
            if per_epoch:
                values.append(per_epoch[-1])
        return values

    def saturated(
        self, window: int = SATURATION_WINDOW, tolerance: float = SATURATION_TOLERANCE
    ) -> bool:
        """Whether the bridge loss has flattened out.

        True when its relative range over the last ``window`` collaborative
        epochs is below ``tolerance``. Reported only; training always runs
        the configured number of epochs.
        """
        values = self.bridge_per_epoch()
        if len(values) < window:
            return False
        tail = np.asarray(values[-window:])
        scale = max(float(np.max(np.abs(tail))), 1e-12)
        return float(np.max(tail) - np.min(tail)) / scale < tolerance


# =============================================================================
# Helpers shared with evaluation
# =============================================================================


def embed_players(
    interpreter: InterpreterModel,
    prepared: PreparedDataset,
    players: np.ndarray,
    chunk: int,
) -> np.ndarray:
    """Latent rows of ``players`` as (len(players), S, M).

    Players are encoded ``chunk`` at a time in the given order, so the same
    call always produces bit-identical values.
    """
    s = prepared.sequences_per_player
    out = np.zeros((len(players), s, interpreter.latent_dim))
    for start in range(0, len(players), chunk):
        idx = players[start : start + chunk]
        x = prepared.x[idx].reshape(len(idx) * s, prepared.pad_length, prepared.n_features)
        lens = prepared.valid_lengths[idx].reshape(-1)
        out[start : start + len(idx)] = interpreter.embed(x, lens).reshape(len(idx), s, -1)
    return out


def assign_clusters(
    cluster_model: ClusterModel, latents: np.ndarray, real_mask: np.ndarray
) -> np.ndarray:
    """(N, S) nearest-centroid ids for real sequences, -1 for padding."""
    ids = np.full(real_mask.shape, -1, dtype=np.int64)
    if np.any(real_mask):
        ids[real_mask] = cluster_model.predict(latents[real_mask])
    return ids


def predict_players(
    interpreter: InterpreterModel,
    classifier: ClassifierModel,
    cluster_model: ClusterModel,
    prepared: PreparedDataset,
    chunk: int,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Classify every player of ``prepared``.

    Returns
    -------
    Tuple[np.ndarray, np.ndarray, np.ndarray]
        Predicted classes (N,), class probabilities (N, C) and the cluster
        ids (N, S) used to build the classifier inputs.
    """
    players = np.arange(prepared.n_players)
    latents = embed_players(interpreter, prepared, players, chunk)
    ids = assign_clusters(cluster_model, latents, prepared.real_mask)
    mapped = map_inputs(
        classifier.variant, latents, ids, prepared.real_mask, cluster_model.k
    )
    activations = classifier.forward(mapped)
    return activations.predictions(), activations.probabilities.data.copy(), ids


# =============================================================================
# Trainer
# =============================================================================


class CollaborativeTrainer:
    """Owns the networks, optimizers and state of one training run.

    Parameters
    ----------
    prepared : PreparedDataset
        Padded, normalized data with a train/test split.
    config : TrainingConfig
        Hyperparameters; validated on construction.
    out_dir : Optional[Union[str, Path]]
        Run directory; checkpoints are written below it when given.

    Raises
    ------
    ConfigError
        If the config is invalid or K exceeds the number of real training
        sequences.
    """

    def __init__(
        self,
        prepared: PreparedDataset,
        config: TrainingConfig,
        out_dir: Optional[Union[str, Path]] = None,
    ) -> None:
        self.config = config.validate()
        self.prepared = prepared
        self.out_dir = Path(out_dir) if out_dir is not None else None
        self.train_players = np.asarray(prepared.train_index, dtype=np.int64)
        if self.train_players.size == 0:
            raise ConfigError("training split is empty")

        real_train = int(prepared.real_mask[self.train_players].sum())
        if config.num_clusters > real_train:
            raise ConfigError(
                f"K={config.num_clusters} exceeds the {real_train} real training sequences"
            )

        s = prepared.sequences_per_player
        self.interpreter = InterpreterModel(
            prepared.n_features, config.hidden_sizes, config.attention_size, seed=config.seed
        )
        self.reducer = Reducer(s, np.random.default_rng(config.seed + 2))
        self.interpreter_optimizer = Adam(
            self.interpreter.parameters() + self.reducer.parameters(), lr=config.interpreter_lr
        )
        self.interpreter_rng = np.random.default_rng(config.seed + 3)
        self.batches = self.partition_players()
        self.reset_classifier()
        self.state = TrainState()
        logger.info(
            f"Trainer ready: variant={config.variant}, K={config.num_clusters}, "
            f"M={config.latent_dim}, interpreter params={self.interpreter.num_parameters()}, "
            f"classifier params={self.classifier.num_parameters()}"
        )

    def reset_classifier(self) -> None:
        """(Re)initialize classifier weights, optimizer and batch order from the seed."""
        cfg = self.config
        self.classifier = ClassifierModel(
            cfg.variant,
            cfg.num_clusters,
            self.prepared.sequences_per_player,
            cfg.latent_dim,
            n_classes=len(CLASS_NAMES),
            conv_channels=cfg.conv_channels,
            recurrent_size=cfg.recurrent_size,
            seed=cfg.seed + 1,
        )
        self.classifier_optimizer = Adam(self.classifier.parameters(), lr=cfg.classifier_lr)
        self.classifier_rng = np.random.default_rng(cfg.seed + 4)

    # ------------------------------------------------------------------
    # Batching
    # ------------------------------------------------------------------

    def _real_count(self, players: np.ndarray) -> int:
        return int(self.prepared.real_mask[players].sum())

    def partition_players(self) -> List[np.ndarray]:
        """Fixed interpreter batches for the whole run.

        A seeded permutation of the training players is cut into chunks of
        B2; a chunk holding fewer than K real sequences is merged into its
        neighbour so every batch can support a K-column indicator. Each batch
        keeps its own indicator, so the partition never changes; only the
        visiting order is reshuffled every inner epoch.
        """
        k = self.config.num_clusters
        order = self.train_players[self.interpreter_rng.permutation(self.train_players.size)]
        b2 = self.config.players_per_batch
        merged: List[np.ndarray] = []
        for start in range(0, order.size, b2):
            chunk = order[start : start + b2]
            if merged and self._real_count(merged[-1]) < k:
                merged[-1] = np.concatenate([merged[-1], chunk])
            else:
                merged.append(chunk)
        if len(merged) > 1 and self._real_count(merged[-1]) < k:
            last = merged.pop()
            merged[-1] = np.concatenate([merged[-1], last])
        return merged

    def _batch_arrays(self, players: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
        s = self.prepared.sequences_per_player
        x = self.prepared.x[players].reshape(
            players.size * s, self.prepared.pad_length, self.prepared.n_features
        )
        lens = self.prepared.valid_lengths[players].reshape(-1)
        ids = np.stack([np.repeat(players, s), np.tile(np.arange(s), players.size)], axis=1)
        return x, lens, ids

    # ------------------------------------------------------------------
    # Phases
    # ------------------------------------------------------------------

    def refresh_indicators(self, batches: List[np.ndarray]) -> None:
        """Recompute every batch's indicator from its current real latent rows."""
        k = self.config.num_clusters
        indicators = []
        for players in batches:
            x, lens, _ = self._batch_arrays(players)
            H = self.interpreter.embed(x, lens)[lens > 0]
            indicators.append(top_k_eigenvectors(H @ H.T, k))
        self.state.indicators = indicators
        self.state.refresh_iterations.append(self.state.interpreter_iterations)
        get_phase_logger(INTERPRETER_PHASE).debug(
            f"Refreshed {len(indicators)} cluster indicators at iteration "
            f"{self.state.interpreter_iterations}"
        )

    def classifier_targets(self) -> np.ndarray:
        """Frozen classifier penultimate activations (N, S) for every player."""
        assert self.state.cluster_ids is not None and self.state.latents is not None
        mapped = map_inputs(
            self.config.variant,
            self.state.latents,
            self.state.cluster_ids,
            self.prepared.real_mask,
            self.config.num_clusters,
        )
        return self.classifier.forward(mapped).penultimate.data.copy()

    def interpreter_phase(self, epoch: int, use_bridge: bool) -> None:
        """Train interpreter and reducer for ``interpreter_inner_epochs``.

        Raises
        ------
        DivergenceError
            If a loss becomes non-finite.
        """
        cfg = self.config
        log = get_phase_logger(INTERPRETER_PHASE)
        s = self.prepared.sequences_per_player
        batches = self.batches
        c_relu = self.classifier_targets() if use_bridge else None
        beta = cfg.beta if use_bridge else 1.0
        log.info(
            f"Epoch {epoch}: interpreter phase, {len(batches)} batches, "
            f"bridge {'on' if use_bridge else 'off'}"
        )

        for inner in range(cfg.interpreter_inner_epochs):
            sums = {"reconstruction": 0.0, "trace": 0.0, "bridge": 0.0, "total": 0.0}
            for b in self.interpreter_rng.permutation(len(batches)):
                players = batches[b]
                if self.state.interpreter_iterations % cfg.refresh_period == 0:
                    self.refresh_indicators(batches)
                x, lens, ids = self._batch_arrays(players)
                latent, x_hat = self.interpreter.forward(x, lens, ids)
                recon = reconstruction_loss(x, x_hat, lens)
                trace = trace_loss(
                    T.getitem(latent.H, np.flatnonzero(lens > 0)), self.state.indicators[b]
                )
                bridge = None
                if use_bridge:
                    assert self.state.cluster_ids is not None and c_relu is not None
                    reduced = [
                        bridge_tensors(
                            latent.H[j * s : (j + 1) * s],
                            self.state.cluster_ids[p],
                            self.reducer,
                        ).reduced
                        for j, p in enumerate(players)
                    ]
                    bridge = bridge_loss(c_relu[players], T.stack(reduced, axis=0))
                total = interpreter_total_loss(recon, trace, bridge, beta, cfg.lambda_)

                value = total.item()
                if not np.isfinite(value):
                    log.error(f"Non-finite interpreter loss in epoch {epoch}, batch {b}")
                    raise DivergenceError(INTERPRETER_PHASE, epoch, self.state.last_checkpoint)

                self.interpreter.zero_grad()
                self.reducer.zero_grad()
                total.backward()
                self.interpreter_optimizer.step()
                self.state.interpreter_iterations += 1
                for indicator in self.state.indicators:
                    indicator.tick()

                sums["reconstruction"] += recon.item()
                sums["trace"] += trace.item()
                sums["total"] += value
                if bridge is not None:
                    sums["bridge"] += bridge.item()

            n = len(batches)
            names = ["reconstruction", "trace"] + (["bridge"] if use_bridge else []) + ["total"]
            for name in names:
                self.state.history.append(epoch, INTERPRETER_PHASE, name, sums[name] / n)
            log.debug(
                f"Epoch {epoch} inner {inner + 1}: "
                + ", ".join(f"{name}={sums[name] / n:.6f}" for name in names)
            )

    def cluster_phase(self, epoch: int) -> None:
        """Fit k-means on the training latents and assign every sequence."""
        log = get_phase_logger(CLUSTER_PHASE)
        prepared = self.prepared
        real = prepared.real_mask
        latents = embed_players(
            self.interpreter,
            prepared,
            np.arange(prepared.n_players),
            self.config.players_per_batch,
        )
        if not np.all(np.isfinite(latents)):
            log.error(f"Non-finite latent rows in epoch {epoch}")
            raise DivergenceError(CLUSTER_PHASE, epoch, self.state.last_checkpoint)

        train_rows = latents[self.train_players][real[self.train_players]]
        _, model = kmeans(
            train_rows, self.config.num_clusters, seed=self.config.seed + KMEANS_SEED_STRIDE * epoch
        )
        ids = assign_clusters(model, latents, real)
        entropies = player_entropies(ids, real, self.config.num_clusters)

        self.state.cluster_model = model
        self.state.cluster_ids = ids
        self.state.latents = latents
        self.state.entropy.record(epoch, entropies)
        log.info(
            f"Epoch {epoch}: k-means inertia={model.inertia:.6f} after {model.n_iter} iterations, "
            f"mean entropy={float(np.mean(entropies)):.4f} bits"
        )

    def classifier_phase(self, epoch: int, phase: str = CLASSIFIER_PHASE) -> None:
        """Train the classifier for ``classifier_inner_epochs`` on the mapped inputs.

        Raises
        ------
        DivergenceError
            If the cross-entropy becomes non-finite.
        """
        assert self.state.cluster_ids is not None and self.state.latents is not None
        cfg = self.config
        log = get_phase_logger(CLASSIFIER_PHASE)
        train = self.train_players
        mapped = map_inputs(
            cfg.variant,
            self.state.latents[train],
            self.state.cluster_ids[train],
            self.prepared.real_mask[train],
            cfg.num_clusters,
        )
        labels = self.prepared.labels[train]
        b2 = cfg.players_per_batch
        log.info(f"Epoch {epoch}: {phase} phase on {train.size} players")

        for inner in range(cfg.classifier_inner_epochs):
            order = self.classifier_rng.permutation(train.size)
            total, batches = 0.0, 0
            for start in range(0, order.size, b2):
                idx = order[start : start + b2]
                loss = cce_loss(self.classifier.forward(mapped[idx]).probabilities, labels[idx])
                value = loss.item()
                if not np.isfinite(value):
                    log.error(f"Non-finite cross-entropy in epoch {epoch}")
                    raise DivergenceError(phase, epoch, self.state.last_checkpoint)
                self.classifier.zero_grad()
                loss.backward()
                self.classifier_optimizer.step()
                total += value
                batches += 1
            self.state.history.append(epoch, phase, "cce", total / batches)
            log.debug(f"Epoch {epoch} inner {inner + 1}: cce={total / batches:.6f}")

    # ------------------------------------------------------------------
    # Checkpoints
    # ------------------------------------------------------------------

    def checkpoint_meta(self) -> Dict[str, Any]:
        """Metadata needed to rebuild the models and the prepared data."""
        prepared = self.prepared
        return {
            "collaborative_epoch": self.state.collaborative_epoch,
            "config": self.config.to_dict(),
            "data": {
                "n_features": prepared.n_features,
                "pad_length": prepared.pad_length,
                "sequences_per_player": prepared.sequences_per_player,
                "schema": prepared.schema.to_dict(),
                "train_index": [int(i) for i in prepared.train_index],
                "test_index": [int(i) for i in prepared.test_index],
            },
            "loss_history": self.state.history.to_list(),
            "interpreter_iterations": self.state.interpreter_iterations,
            "rng": {
                "interpreter": self.interpreter_rng.bit_generator.state,
                "classifier": self.classifier_rng.bit_generator.state,
            },
        }

    def save(self, name: str) -> Optional[Path]:
        """Write ``checkpoints/<name>`` under the run directory, if any."""
        if self.out_dir is None:
            return None
        arrays = {}
        if self.state.cluster_model is not None:
            arrays["cluster"] = {"centroids": self.state.cluster_model.centroids}
        path = save_checkpoint(
            self.out_dir / CHECKPOINT_DIR / name,
            {
                "interpreter": self.interpreter,
                "reducer": self.reducer,
                "classifier": self.classifier,
            },
            self.checkpoint_meta(),
            arrays=arrays,
        )
        self.state.checkpoints.append(str(path))
        return path

    # ------------------------------------------------------------------

    def run(self) -> TrainState:
        """Run all collaborative epochs; returns the final state."""
        cfg = self.config
        for epoch in range(1, cfg.collaborative_epochs + 1):
            self.state.collaborative_epoch = epoch
            self.interpreter_phase(epoch, use_bridge=epoch > 1)
            self.cluster_phase(epoch)
            self.classifier_phase(epoch)
            self.save(f"epoch_{epoch:03d}")
            logger.info(f"Collaborative epoch {epoch}/{cfg.collaborative_epochs} complete")
        self.save(FINAL_CHECKPOINT)
        if self.state.saturated():
            logger.info("Bridge loss saturated over the last collaborative epochs")
        return self.state


def collaborative_train(
    prepared: PreparedDataset,
    config: TrainingConfig,
    out_dir: Optional[Union[str, Path]] = None,
) -> Tuple[InterpreterModel, ClassifierModel, TrainState]:
    """Train interpreter and classifier collaboratively.

    Parameters
    ----------
    prepared : PreparedDataset
        Output of ``prepare_dataset``.
    config : TrainingConfig
        Hyperparameters.
    out_dir : Optional[Union[str, Path]]
        When given, per-epoch and final checkpoints are written below it.

    Returns
    -------
    Tuple[InterpreterModel, ClassifierModel, TrainState]
        Trained networks and the run's history.

    Raises
    ------
    ConfigError
        If the config is invalid or K exceeds the real training sequences.
    DivergenceError
        If any loss becomes non-finite.
    """
    trainer = CollaborativeTrainer(prepared, config, out_dir)
    state = trainer.run()
    return trainer.interpreter, trainer.classifier, state


def score_trainer(trainer: CollaborativeTrainer) -> Dict[str, MetricsReport]:
    """Metrics of a trained run on its held-out and training players.

    Returns
    -------
    Dict[str, MetricsReport]
        Keyed by split name; "test" is absent when the split is empty.
    """
    if trainer.state.cluster_model is None:
        raise ValueError("trainer has not completed a cluster phase")
    prepared = trainer.prepared
    predictions, _, _ = predict_players(
        trainer.interpreter,
        trainer.classifier,
        trainer.state.cluster_model,
        prepared,
        trainer.config.players_per_batch,
    )
    reports: Dict[str, MetricsReport] = {}
    for split, index in (("test", prepared.test_index), ("train", prepared.train_index)):
        if len(index):
            reports[split] = precision_recall(
                predictions[index],
                prepared.labels[index],
                n_classes=len(CLASS_NAMES),
                config_hash=trainer.config.config_hash(),
                seed=trainer.config.seed,
                split=split,
            )
    return reports


def primary_report(reports: Dict[str, MetricsReport]) -> MetricsReport:
    """The held-out report, or the training report when nothing was held out."""
    return reports["test"] if "test" in reports else reports["train"]


def restore_trainer(
    checkpoint_dir: Union[str, Path],
    samples: Sequence[PlayerSample],
    schema: FeatureSchema,
) -> CollaborativeTrainer:
    """Rebuild a trained run from a checkpoint and its dataset.

    The dataset is prepared with the checkpoint's pad length, sequence
    count, normalization statistics and split, so predictions match the
    ones made at the end of training bit for bit.

    Construction re-derives every weight and generator from the config
    seed; the saved weights then replace the initial ones and the
    shuffling generators are set to their saved states, so further
    training draws the same batch orders the original run would have.

    Raises
    ------
    CheckpointError
        If the checkpoint is missing, corrupt or does not match the dataset.
    """
    checkpoint = load_checkpoint(checkpoint_dir)
    meta = checkpoint.meta
    try:
        config = TrainingConfig.from_dict(meta["config"])
        data = meta["data"]
        stats = NormalizationStats.from_dict(data["schema"]["stats"])
    except (KeyError, ConfigError) as e:
        raise CheckpointError(f"incomplete checkpoint metadata in {checkpoint_dir}: {e}") from e

    prepared = prepare_dataset(
        samples,
        schema,
        config.train_fraction,
        config.seed,
        pad_length=int(data["pad_length"]),
        sequences_per_player=int(data["sequences_per_player"]),
        stats=stats,
    )
    if prepared.n_features != int(data["n_features"]) or (
        prepared.train_index.tolist() != list(data["train_index"])
    ):
        raise CheckpointError(f"dataset does not match the run in {checkpoint_dir}")

    trainer = CollaborativeTrainer(prepared, config)
    checkpoint.load_into("interpreter", trainer.interpreter)
    checkpoint.load_into("reducer", trainer.reducer)
    checkpoint.load_into("classifier", trainer.classifier)
    centroids = checkpoint.group("cluster")["centroids"]
    trainer.state.cluster_model = ClusterModel(
        centroids=centroids, k=int(centroids.shape[0]), seed=config.seed
    )
    trainer.state.collaborative_epoch = int(meta.get("collaborative_epoch", 0))
    trainer.state.history = LossHistory.from_list(meta.get("loss_history", []))
    trainer.state.interpreter_iterations = int(meta.get("interpreter_iterations", 0))
    rng_states = meta.get("rng", {})
    if "interpreter" in rng_states:
        trainer.interpreter_rng.bit_generator.state = rng_states["interpreter"]
    if "classifier" in rng_states:
        trainer.classifier_rng.bit_generator.state = rng_states["classifier"]
    return trainer
