"""Integration tests for collaborative training.

Tests for:
- Reproducibility of a full run
- First-epoch loss composition and when the bridge is active
- Indicator refresh schedule and frozen phases
- Padded sequences, invalid K and untrained classifiers
- Divergence handling
- Checkpoint restore
"""

from dataclasses import replace

import numpy as np
import pytest

from seqforge.core.constants import CHECKPOINT_DIR, FINAL_CHECKPOINT
from seqforge.core.exceptions import CheckpointError, ConfigError, DivergenceError
from seqforge.data.dataset import prepare_dataset
from seqforge.numerics.tensor import Tensor
from seqforge.training.trainer import (
    CLASSIFIER_PHASE,
    INTERPRETER_PHASE,
    CollaborativeTrainer,
    predict_players,
    restore_trainer,
    score_trainer,
)


@pytest.fixture
def trained(toy_prepared, tiny_config, tmp_path):
    trainer = CollaborativeTrainer(toy_prepared, tiny_config, tmp_path / "run")
    trainer.run()
    return trainer


def predictions_of(trainer):
    return predict_players(
        trainer.interpreter,
        trainer.classifier,
        trainer.state.cluster_model,
        trainer.prepared,
        trainer.config.players_per_batch,
    )


# =============================================================================
# Full Run Tests
# =============================================================================


class TestCollaborativeRun:
    """Tests for a complete training run."""

    def test_reproducible(self, toy_prepared, tiny_config, trained):
        """Test that the same seed gives identical histories and weights."""
        again = CollaborativeTrainer(toy_prepared, tiny_config)
        again.run()
        assert again.state.history.to_list() == trained.state.history.to_list()
        assert again.interpreter.checksum() == trained.interpreter.checksum()
        assert again.classifier.checksum() == trained.classifier.checksum()
        np.testing.assert_array_equal(again.state.cluster_ids, trained.state.cluster_ids)

    def test_seed_changes_run(self, toy_prepared, tiny_config, trained):
        """Test that another seed gives other weights."""
        other = CollaborativeTrainer(toy_prepared, tiny_config.replace(seed=8))
        assert other.interpreter.checksum() != trained.interpreter.checksum()

    def test_batches(self, trained):
        """Test the fixed player partition."""
        sizes = sorted(b.size for b in trained.batches)
        assert sizes == [1, 4, 4]
        covered = np.sort(np.concatenate(trained.batches))
        np.testing.assert_array_equal(covered, trained.prepared.train_index)

    def test_outputs(self, trained, tmp_path):
        """Test checkpoints, entropy trace and scores."""
        ckpt = tmp_path / "run" / CHECKPOINT_DIR
        assert sorted(p.name for p in ckpt.iterdir()) == ["epoch_001", "epoch_002", "final"]
        assert trained.state.entropy.epochs == [1, 2]
        assert trained.state.cluster_ids.shape == (12, 4)
        reports = score_trainer(trained)
        assert set(reports) == {"test", "train"}
        assert reports["test"].support.sum() == 3
        assert len(trained.state.history.values(CLASSIFIER_PHASE, "cce")) == 4


class TestLossComposition:
    """Tests for the interpreter objective across epochs."""

    def test_first_epoch_has_no_bridge(self, trained, tiny_config):
        """Test total = recon + lambda/2 * trace while the bridge is off."""
        history = trained.state.history
        recon = history.values(INTERPRETER_PHASE, "reconstruction", 1)
        trace = history.values(INTERPRETER_PHASE, "trace", 1)
        total = history.values(INTERPRETER_PHASE, "total", 1)
        assert history.values(INTERPRETER_PHASE, "bridge", 1) == []
        for r, t, tot in zip(recon, trace, total):
            assert tot == pytest.approx(r + tiny_config.lambda_ / 2 * t, rel=1e-12, abs=1e-12)

    def test_bridge_from_second_epoch(self, trained):
        """Test that the bridge loss is recorded once the classifier exists."""
        bridge = trained.state.history.values(INTERPRETER_PHASE, "bridge", 2)
        assert len(bridge) == 1
        assert np.isfinite(bridge[0]) and bridge[0] >= 0.0
        assert trained.state.bridge_per_epoch() == bridge

    def test_refresh_schedule(self, trained):
        """Test refreshes every I interpreter iterations across epochs."""
        # 3 batches x 1 inner epoch x 2 collaborative epochs, I = 2
        assert trained.state.interpreter_iterations == 6
        assert trained.state.refresh_iterations == [0, 2, 4]
        assert all(ind.is_orthonormal() for ind in trained.state.indicators)


# =============================================================================
# Phase Isolation Tests
# =============================================================================


class TestPhases:
    """Tests that each phase only moves its own weights."""

    def test_frozen_networks(self, toy_prepared, tiny_config):
        """Test checksums across the three phases of two epochs."""
        trainer = CollaborativeTrainer(toy_prepared, tiny_config)
        classifier = trainer.classifier.checksum()
        interpreter = trainer.interpreter.checksum()

        trainer.interpreter_phase(1, use_bridge=False)
        assert trainer.classifier.checksum() == classifier
        assert trainer.interpreter.checksum() != interpreter

        trainer.cluster_phase(1)
        interpreter = trainer.interpreter.checksum()
        reducer = trainer.reducer.checksum()
        trainer.classifier_phase(1)
        assert trainer.interpreter.checksum() == interpreter
        assert trainer.reducer.checksum() == reducer
        assert trainer.classifier.checksum() != classifier

        classifier = trainer.classifier.checksum()
        trainer.interpreter_phase(2, use_bridge=True)
        assert trainer.classifier.checksum() == classifier
        assert trainer.reducer.checksum() != reducer

    def test_padded_sequences(self, toy_samples, toy_schema, tiny_config):
        """Test that padding sequences get id -1 and no latent weight."""
        samples = list(toy_samples)
        for i in (0, 5, 10):
            samples[i] = replace(samples[i], sequences=samples[i].sequences[:2])
        prepared = prepare_dataset(samples, toy_schema, 0.75, seed=0)
        assert prepared.sequences_per_player == 4

        trainer = CollaborativeTrainer(prepared, tiny_config)
        trainer.run()
        ids = trainer.state.cluster_ids
        for i in (0, 5, 10):
            assert ids[i, 2:].tolist() == [-1, -1]
            assert np.all(ids[i, :2] >= 0)
        assert np.all(ids[prepared.real_mask] >= 0)

    def test_k_larger_than_sequences(self, toy_prepared, tiny_config):
        """Test that K above the real training sequence count is rejected."""
        with pytest.raises(ConfigError, match="exceeds"):
            CollaborativeTrainer(toy_prepared, tiny_config.replace(K=37))

    def test_untrained_classifier_is_uniform(self, toy_prepared, tiny_config):
        """Test predictions with zero classifier epochs."""
        trainer = CollaborativeTrainer(
            toy_prepared, tiny_config.replace(classifier_inner_epochs=0, collaborative_epochs=1)
        )
        trainer.run()
        predictions, probabilities, _ = predictions_of(trainer)
        np.testing.assert_allclose(probabilities, 1.0 / 3.0)
        np.testing.assert_array_equal(predictions, 0)

    def test_divergence(self, toy_prepared, tiny_config, monkeypatch):
        """Test that a non-finite loss stops training with the phase named."""
        monkeypatch.setattr(
            "seqforge.training.trainer.reconstruction_loss",
            lambda x, x_hat, lens: Tensor(np.nan),
        )
        trainer = CollaborativeTrainer(toy_prepared, tiny_config)
        with pytest.raises(DivergenceError) as info:
            trainer.run()
        assert info.value.phase == INTERPRETER_PHASE
        assert info.value.epoch == 1


# =============================================================================
# Restore Tests
# =============================================================================


class TestRestore:
    """Tests for rebuilding a run from its final checkpoint."""

    def test_bit_identical_predictions(self, trained, toy_samples, toy_schema, tmp_path):
        """Test that a restored run predicts exactly what the trained run did."""
        restored = restore_trainer(
            tmp_path / "run" / CHECKPOINT_DIR / FINAL_CHECKPOINT, toy_samples, toy_schema
        )
        expected = predictions_of(trained)
        actual = predictions_of(restored)
        for a, b in zip(expected, actual):
            np.testing.assert_array_equal(a, b)
        assert restored.state.history.to_list() == trained.state.history.to_list()
        assert restored.state.collaborative_epoch == 2

    def test_generator_states_restored(self, trained, toy_samples, toy_schema, tmp_path):
        """Test that shuffling generators continue where the run stopped."""
        restored = restore_trainer(
            tmp_path / "run" / CHECKPOINT_DIR / FINAL_CHECKPOINT, toy_samples, toy_schema
        )
        assert restored.state.interpreter_iterations == trained.state.interpreter_iterations
        np.testing.assert_array_equal(
            restored.interpreter_rng.permutation(20), trained.interpreter_rng.permutation(20)
        )
        np.testing.assert_array_equal(
            restored.classifier_rng.permutation(20), trained.classifier_rng.permutation(20)
        )

    def test_other_dataset_rejected(self, trained, toy_samples, toy_schema, tmp_path):
        """Test restoring against a dataset the run was not trained on."""
        with pytest.raises(CheckpointError):
            restore_trainer(
                tmp_path / "run" / CHECKPOINT_DIR / FINAL_CHECKPOINT, toy_samples[:8], toy_schema
            )

    def test_missing_checkpoint(self, toy_samples, toy_schema, tmp_path):
        """Test a run directory without checkpoints."""
        with pytest.raises(CheckpointError):
            restore_trainer(tmp_path / "nowhere", toy_samples, toy_schema)
