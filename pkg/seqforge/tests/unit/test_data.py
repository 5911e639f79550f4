"""Tests for the data package.

Tests for:
- Feature schema encoding
- JSON-lines dataset loading and its error messages
- Pad length, padding/truncation and sequence count fixing
- Normalization and the per-class split
- The synthetic generator
"""

import json

import numpy as np
import pytest

from seqforge.core.constants import SCHEMA_SIDECAR, SPEC_SIDECAR
from seqforge.core.exceptions import ConfigError, DataFormatError
from seqforge.data.dataset import (
    GameSequence,
    PlayerSample,
    compute_normalization_stats,
    compute_pad_length,
    fix_sequence_count,
    load_dataset,
    normalize,
    pad_truncate,
    prepare_dataset,
    split_indices,
)
from seqforge.data.schema import FeatureSchema, FeatureSpec, load_schema
from seqforge.data.synthetic import GeneratorSpec, generate_synthetic, write_synthetic
from seqforge.evaluation.recovery import cluster_recovery, nearest_mean_assignments
from seqforge.tests.conftest import make_sample


@pytest.fixture
def mixed_schema():
    return FeatureSchema(
        features=[
            FeatureSpec("fee"),
            FeatureSpec("won", kind="boolean"),
            FeatureSpec("table", kind="categorical", categories=("2p", "6p")),
        ]
    )


def write_lines(path, records):
    path.write_text("\n".join(json.dumps(r) for r in records) + "\n", encoding="utf-8")
    return path


# =============================================================================
# Schema Tests
# =============================================================================


class TestFeatureSchema:
    """Tests for per-game encoding."""

    def test_encode(self, mixed_schema):
        """Test numeric, boolean and one-hot columns."""
        vector = mixed_schema.encode({"fee": 2.5, "won": True, "table": "6p"})
        np.testing.assert_array_equal(vector, [2.5, 1.0, 0.0, 1.0])
        assert mixed_schema.width == 4
        assert mixed_schema.column_names == ["fee", "won", "table=2p", "table=6p"]

    def test_decode_inverts_encode(self, mixed_schema):
        """Test that decoding restores the record."""
        record = {"fee": -1.0, "won": False, "table": "2p"}
        assert mixed_schema.decode(mixed_schema.encode(record)) == record

    @pytest.mark.parametrize(
        "record, message",
        [
            ({"fee": 1.0, "won": True, "table": "2p", "extra": 1}, "unknown feature"),
            ({"fee": 1.0, "won": True}, "missing feature"),
            ({"fee": 1.0, "won": True, "table": "9p"}, "unknown category"),
            ({"fee": "a lot", "won": True, "table": "2p"}, "must be numeric"),
            ({"fee": float("inf"), "won": True, "table": "2p"}, "not finite"),
        ],
    )
    def test_encode_errors(self, mixed_schema, record, message):
        """Test that malformed games are rejected with a named problem."""
        with pytest.raises(DataFormatError, match=message):
            mixed_schema.encode(record, line_number=7)

    def test_invalid_schema(self):
        """Test schema validation."""
        with pytest.raises(DataFormatError):
            FeatureSchema(features=[FeatureSpec("a", kind="text")])
        with pytest.raises(DataFormatError):
            FeatureSchema(features=[FeatureSpec("a"), FeatureSpec("a")])

    def test_load_schema(self, tmp_path, mixed_schema):
        """Test reading a schema file."""
        path = tmp_path / "schema.json"
        path.write_text(json.dumps(mixed_schema.to_dict()), encoding="utf-8")
        assert load_schema(path).column_names == mixed_schema.column_names
        with pytest.raises(FileNotFoundError):
            load_schema(tmp_path / "missing.json")


# =============================================================================
# Dataset Loading Tests
# =============================================================================


class TestLoadDataset:
    """Tests for JSON-lines ingestion."""

    def _record(self, player_id="p1", label="Burnout"):
        return {
            "player_id": player_id,
            "label": label,
            "sequences": [[{"v": 1.0}, {"v": 2.0}], []],
        }

    def test_load(self, tmp_path):
        """Test labels, lengths and file order."""
        schema = FeatureSchema.numeric(["v"])
        path = write_lines(
            tmp_path / "d.jsonl", [self._record("a", "Burnout"), self._record("b", "sustainer")]
        )
        samples = load_dataset(path, schema)
        assert [s.player_id for s in samples] == ["a", "b"]
        assert [s.label for s in samples] == [1, 0]
        assert [seq.raw_length for seq in samples[0].sequences] == [2, 0]

    def test_malformed_line_is_named(self, tmp_path):
        """Test that the failing line number is reported."""
        schema = FeatureSchema.numeric(["v"])
        path = tmp_path / "d.jsonl"
        path.write_text(json.dumps(self._record()) + "\n{not json\n", encoding="utf-8")
        with pytest.raises(DataFormatError, match="line 2"):
            load_dataset(path, schema)

    def test_unknown_label(self, tmp_path):
        """Test label validation."""
        path = write_lines(tmp_path / "d.jsonl", [self._record(label="Whale")])
        with pytest.raises(DataFormatError, match="unknown label"):
            load_dataset(path, FeatureSchema.numeric(["v"]))

    def test_archetype_count_mismatch(self, tmp_path):
        """Test that archetype labels must cover every sequence."""
        record = dict(self._record(), archetypes=[0])
        path = write_lines(tmp_path / "d.jsonl", [record])
        with pytest.raises(DataFormatError, match="archetypes"):
            load_dataset(path, FeatureSchema.numeric(["v"]))

    def test_missing_file(self, tmp_path):
        """Test a missing dataset."""
        with pytest.raises(FileNotFoundError):
            load_dataset(tmp_path / "nope.jsonl", FeatureSchema.numeric(["v"]))


# =============================================================================
# Padding Tests
# =============================================================================


class TestPadding:
    """Tests for pad length, padding and sequence counts."""

    def test_pad_length_percentile(self):
        """Test the nearest-rank 95th percentile."""
        sample = make_sample("p", 0, list(range(1, 101)))
        assert compute_pad_length([sample]) == 95

    def test_pad_length_two_values(self):
        """Test that two lengths give the larger one."""
        assert compute_pad_length([make_sample("p", 0, [5, 200])]) == 200

    def test_pad_length_ignores_empty(self):
        """Test that empty sequences do not count."""
        assert compute_pad_length([make_sample("p", 0, [0, 0, 0, 4])]) == 4
        with pytest.raises(DataFormatError):
            compute_pad_length([make_sample("p", 0, [0, 0])])

    def test_truncate_keeps_most_recent(self):
        """Test that the last L games survive truncation."""
        games = np.arange(6, dtype=float).reshape(6, 1)
        padded = pad_truncate(GameSequence(games=games), 4)
        np.testing.assert_array_equal(padded.padded[:, 0], [2.0, 3.0, 4.0, 5.0])
        assert padded.valid_length == 4

    def test_pad_zero_fills_tail(self):
        """Test zero padding after the valid rows."""
        padded = pad_truncate(GameSequence(games=np.ones((2, 3))), 5)
        assert padded.valid_length == 2
        assert np.all(padded.padded[2:] == 0.0)
        assert np.all(padded.padded[:2] == 1.0)

    def test_fix_sequence_count(self):
        """Test dropping oldest sequences and appending empty ones."""
        sample = make_sample("p", 0, [1, 2, 3])
        trimmed = fix_sequence_count(sample, 2, 1)
        assert [seq.raw_length for seq in trimmed.sequences] == [2, 3]
        grown = fix_sequence_count(sample, 5, 1)
        assert [seq.raw_length for seq in grown.sequences] == [1, 2, 3, 0, 0]
        assert not grown.sequences[-1].is_real


# =============================================================================
# Normalization and Split Tests
# =============================================================================


class TestNormalization:
    """Tests for training-split z-scoring."""

    def test_stats_ignore_padding(self):
        """Test that padded rows do not enter the statistics."""
        schema = FeatureSchema.numeric(["a", "b"])
        games = np.array([[1.0, 5.0], [3.0, 5.0]])
        sample = PlayerSample("p", 0, [pad_truncate(GameSequence(games=games), 4)])
        stats = compute_normalization_stats([sample], schema)
        np.testing.assert_allclose(stats.mean, [2.0, 0.0])
        np.testing.assert_allclose(stats.std, [1.0, 1.0])
        # the constant column is passed through
        np.testing.assert_array_equal(stats.normalized, [True, False])

        normalized = normalize([sample], stats)[0].sequences[0].padded
        np.testing.assert_allclose(normalized[:2], [[-1.0, 5.0], [1.0, 5.0]])
        assert np.all(normalized[2:] == 0.0)

    def test_split_is_per_class_and_seeded(self):
        """Test class-balanced, reproducible splits."""
        labels = np.array([0] * 10 + [1] * 10 + [2] * 4)
        train, test = split_indices(labels, 0.8, seed=3)
        again, _ = split_indices(labels, 0.8, seed=3)
        np.testing.assert_array_equal(train, again)
        assert [int(np.sum(labels[train] == c)) for c in range(3)] == [8, 8, 3]
        assert sorted(train.tolist() + test.tolist()) == list(range(24))
        assert np.all(np.diff(train) > 0)

    def test_prepare_dataset(self, toy_samples, toy_schema):
        """Test shapes and the attached statistics."""
        prepared = prepare_dataset(toy_samples, toy_schema, 0.75, seed=0)
        assert prepared.x.shape == (12, 4, 5, 2)
        assert prepared.raw.shape == prepared.x.shape
        assert prepared.schema.stats is not None
        assert prepared.train_index.size == 9
        assert prepared.has_archetypes
        assert np.all(prepared.x[~prepared.real_mask] == 0.0)

    def test_prepare_reuses_stats(self, toy_samples, toy_schema):
        """Test that saved statistics and sizes are honoured."""
        first = prepare_dataset(toy_samples, toy_schema, 0.75, seed=0)
        again = prepare_dataset(
            toy_samples,
            toy_schema,
            0.75,
            seed=0,
            pad_length=first.pad_length,
            sequences_per_player=first.sequences_per_player,
            stats=first.schema.stats,
        )
        np.testing.assert_array_equal(first.x, again.x)

    def test_default_sequence_count_is_max(self, toy_schema):
        """Test that S defaults to the largest sequence count."""
        samples = [make_sample("a", 0, [2, 3], 2), make_sample("b", 1, [2, 2, 2], 2)]
        prepared = prepare_dataset(samples, toy_schema, 1.0, seed=0)
        assert prepared.sequences_per_player == 3
        assert prepared.real_mask.tolist() == [[True, True, False], [True, True, True]]


# =============================================================================
# Synthetic Generator Tests
# =============================================================================


class TestSynthetic:
    """Tests for the planted-archetype generator."""

    def test_counts_and_ground_truth(self, toy_spec):
        """Test player counts, sequence counts and archetype labels."""
        samples = generate_synthetic(toy_spec, 5, seed=1)
        assert len(samples) == 15
        assert [s.label for s in samples] == [0] * 5 + [1] * 5 + [2] * 5
        for sample in samples:
            assert len(sample.sequences) == toy_spec.sequences_per_player
            assert np.all(sample.archetypes() >= 0)
            assert all(3 <= seq.raw_length <= 5 for seq in sample.sequences)

    def test_absorbing_class_keeps_archetype(self, toy_spec):
        """Test that an identity transition matrix never changes archetype."""
        for sample in generate_synthetic(toy_spec, 5, seed=2)[:5]:
            assert len(set(sample.archetypes().tolist())) == 1

    def test_transition_frequencies_match_class_matrix(self):
        """Test empirical archetype transitions over 10,000 steps per class."""
        matrices = [
            [[0.6, 0.3, 0.1], [0.2, 0.5, 0.3], [0.25, 0.25, 0.5]],
            [[0.1, 0.8, 0.1], [0.3, 0.4, 0.3], [0.4, 0.2, 0.4]],
            [[1.0 / 3.0] * 3] * 3,
        ]
        spec = GeneratorSpec(
            means=[[0.0], [1.0], [2.0]],
            stds=[[0.1]] * 3,
            length_ranges=[[1, 1]] * 3,
            transitions=matrices,
            sequences_per_player=101,
        )
        samples = generate_synthetic(spec, 100, seed=5)
        for label, expected in enumerate(matrices):
            counts = np.zeros((3, 3))
            for sample in samples:
                if sample.label != label:
                    continue
                chain = sample.archetypes()
                np.add.at(counts, (chain[:-1], chain[1:]), 1.0)
            assert counts.sum() == 10_000
            empirical = counts / counts.sum(axis=1, keepdims=True)
            np.testing.assert_allclose(empirical, expected, atol=0.05)

    def test_deterministic(self, toy_spec):
        """Test seeded reproducibility."""
        a = generate_synthetic(toy_spec, 2, seed=9)
        b = generate_synthetic(toy_spec, 2, seed=9)
        for x, y in zip(a, b):
            for sx, sy in zip(x.sequences, y.sequences):
                np.testing.assert_array_equal(sx.games, sy.games)

    def test_row_sum_error_names_row(self, toy_spec):
        """Test that a bad transition row is reported by class and row."""
        values = toy_spec.to_dict()
        values["transitions"]["Burnout"][1] = [0.5, 0.6]
        with pytest.raises(ConfigError, match="Burnout row 1"):
            GeneratorSpec.from_dict(values).validate()

    def test_write_and_reload(self, tmp_path, toy_spec):
        """Test sidecars and that the written file reloads exactly."""
        samples = generate_synthetic(toy_spec, 2, seed=4)
        path = write_synthetic(samples, toy_spec, tmp_path / "players.jsonl", 2, 4)
        assert (tmp_path / SCHEMA_SIDECAR).exists()
        sidecar = json.loads((tmp_path / SPEC_SIDECAR).read_text(encoding="utf-8"))
        assert sidecar["seed"] == 4 and sidecar["n_per_class"] == 2

        reloaded = load_dataset(path, load_schema(tmp_path / SCHEMA_SIDECAR))
        assert len(path.read_text(encoding="utf-8").splitlines()) == 6
        for original, loaded in zip(samples, reloaded):
            np.testing.assert_array_equal(original.archetypes(), loaded.archetypes())
            for a, b in zip(original.sequences, loaded.sequences):
                np.testing.assert_array_equal(a.games, b.games)

    def test_nearest_mean_oracle_separates_archetypes(self):
        """Test that per-sequence means identify well-separated archetypes."""
        spec = GeneratorSpec(
            means=[[0.0, 0.0], [10.0, 10.0], [-10.0, -10.0]],
            stds=[[0.5, 0.5]] * 3,
            length_ranges=[[3, 6]] * 3,
            transitions=[np.full((3, 3), 1.0 / 3.0).tolist()] * 3,
            sequences_per_player=6,
        )
        prepared = prepare_dataset(generate_synthetic(spec, 10, seed=0), spec.schema(), 1.0, 0)
        assigned = nearest_mean_assignments(
            prepared.raw, prepared.valid_lengths, np.asarray(spec.means)
        )
        truth = prepared.archetypes[prepared.real_mask]
        assert np.mean(assigned == truth) > 0.99
        assert cluster_recovery(assigned, truth) > 0.95
