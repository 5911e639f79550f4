"""Tests for the classifier package.

Tests for:
- Adjacency, frequency and sequential mappings
- The three classifier variants
- Categorical cross-entropy
"""

import math

import numpy as np
import pytest

from seqforge.classifier.losses import cce_loss
from seqforge.classifier.mapping import (
    build_adjacency,
    map_frequency,
    map_inputs,
    map_sequential,
)
from seqforge.classifier.model import ClassifierModel
from seqforge.core.exceptions import ShapeError
from seqforge.numerics.gradcheck import grad_check
from seqforge.numerics.tensor import Tensor

K, S, M = 3, 4, 5


def random_inputs(variant, rng, batch=4):
    latents = rng.normal(size=(batch, S, M))
    ids = rng.integers(0, K, size=(batch, S))
    real = np.ones((batch, S), dtype=bool)
    real[0, -1] = False
    return map_inputs(variant, latents, ids, real, K)


# =============================================================================
# Mapping Tests
# =============================================================================


class TestAdjacency:
    """Tests for the transition-matrix mapping."""

    def test_counts(self):
        """Test counting of consecutive pairs."""
        matrix = build_adjacency(np.array([0, 1, 1, 0]), 2)
        np.testing.assert_array_equal(matrix.counts, [[0, 1], [1, 1]])
        assert matrix.total == 3
        np.testing.assert_allclose(matrix.normalized.sum(), 1.0)

    def test_total_is_real_pairs(self):
        """Test that pairs touching a padded sequence are skipped."""
        ids = np.array([2, 0, 1, -1, -1])
        real = np.array([True, True, True, False, False])
        matrix = build_adjacency(ids, 3, real)
        assert matrix.total == 2
        assert matrix.counts[2, 0] == 1 and matrix.counts[0, 1] == 1

    def test_single_sequence_is_all_zero(self):
        """Test a player without transitions."""
        matrix = build_adjacency(np.array([1]), 3)
        assert matrix.total == 0
        assert np.all(matrix.normalized == 0.0)

    def test_out_of_range(self):
        """Test id validation."""
        with pytest.raises(ValueError):
            build_adjacency(np.array([0, 3]), 3)


class TestFrequencyAndSequential:
    """Tests for the histogram and ordered-latent mappings."""

    def test_frequency(self):
        """Test the normalized histogram over real sequences."""
        hist = map_frequency(np.array([0, 0, 1, -1]), 3, np.array([1, 1, 1, 0], dtype=bool))
        np.testing.assert_allclose(hist, [2 / 3, 1 / 3, 0.0])

    def test_frequency_all_padded(self):
        """Test that a player without real sequences is rejected."""
        with pytest.raises(ValueError):
            map_frequency(np.array([-1, -1]), 2, np.array([False, False]))

    def test_sequential_zeroes_padding(self, rng):
        """Test that padded rows become zero and order is kept."""
        latents = rng.normal(size=(3, 2))
        mapped = map_sequential(latents, np.array([True, False, True]))
        np.testing.assert_array_equal(mapped[[0, 2]], latents[[0, 2]])
        assert np.all(mapped[1] == 0.0)

    @pytest.mark.parametrize(
        "variant, shape", [("tm", (4, 1, K, K)), ("s", (4, S, M)), ("f", (4, K))]
    )
    def test_batch_shapes(self, rng, variant, shape):
        """Test ``map_inputs`` shapes per variant."""
        assert random_inputs(variant, rng).shape == shape

    def test_unknown_variant(self, rng):
        """Test variant validation."""
        with pytest.raises(ValueError):
            map_inputs("x", np.zeros((1, S, M)), np.zeros((1, S), int), np.ones((1, S), bool), K)


# =============================================================================
# Model Tests
# =============================================================================


class TestClassifierModel:
    """Tests for the classifier variants."""

    @pytest.mark.parametrize("variant", ["tm", "s", "f"])
    def test_untrained_is_uniform(self, rng, variant):
        """Test that the zero-initialized head gives equal probabilities."""
        model = ClassifierModel(variant, K, S, M, conv_channels=(2, 2), recurrent_size=3)
        out = model.forward(random_inputs(variant, rng))
        assert out.penultimate.shape == (4, S)
        np.testing.assert_allclose(out.probabilities.data, 1.0 / 3.0)
        np.testing.assert_array_equal(out.predictions(), 0)

    @pytest.mark.parametrize("variant", ["tm", "s", "f"])
    def test_gradients(self, rng, variant):
        """Test backpropagation through every variant."""
        model = ClassifierModel(variant, K, S, M, conv_channels=(2, 2), recurrent_size=3, seed=4)
        # random biases keep ReLU inputs away from the kink at zero
        for param in model.parameters():
            param.data[...] = rng.normal(scale=0.5, size=param.shape)
        mapped = random_inputs(variant, rng)
        labels = np.array([0, 1, 2, 1])

        def loss():
            return cce_loss(model.forward(mapped).probabilities, labels)

        assert grad_check(loss, model.parameters()) < 1e-4

    def test_wrong_input_shape(self, rng):
        """Test that a mapping for another variant is rejected."""
        model = ClassifierModel("f", K, S, M)
        with pytest.raises(ShapeError):
            model.forward(random_inputs("tm", rng))

    def test_unknown_variant(self):
        """Test variant validation."""
        with pytest.raises(ValueError):
            ClassifierModel("cnn", K, S, M)


class TestCCELoss:
    """Tests for categorical cross-entropy."""

    def test_uniform_is_log_classes(self):
        """Test the loss of a uniform prediction."""
        probs = Tensor(np.full((2, 3), 1.0 / 3.0))
        assert cce_loss(probs, np.array([0, 2])).item() == pytest.approx(math.log(3))

    def test_zero_probability_is_floored(self):
        """Test that a zero probability gives a finite loss."""
        probs = Tensor(np.array([[1.0, 0.0, 0.0]]))
        assert cce_loss(probs, np.array([1])).item() == pytest.approx(-math.log(1e-12))

    def test_validation(self):
        """Test label shape and range checks."""
        probs = Tensor(np.full((2, 3), 1.0 / 3.0))
        with pytest.raises(ShapeError):
            cce_loss(probs, np.array([0]))
        with pytest.raises(ValueError):
            cce_loss(probs, np.array([0, 3]))
