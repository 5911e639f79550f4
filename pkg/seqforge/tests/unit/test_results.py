"""Tests for the results infrastructure and training configuration.

Tests for:
- CSV/JSON writers and the run manifest
- Metrics, confusion and summary report files
- TrainingConfig validation and file keys
- Preset loading, merging and sweep grids
- Checkpoint blobs and directories
"""

import json
import tempfile
from pathlib import Path

import numpy as np
import pytest

from seqforge.configs import (
    list_generators,
    list_grids,
    list_presets,
    load_base_config,
    load_config_file,
    load_preset,
    resolve_config,
)
from seqforge.core.base import FILE_KEYS, TrainingConfig
from seqforge.core.exceptions import CheckpointError, ConfigError
from seqforge.evaluation.metrics import precision_recall
from seqforge.numerics.module import Dense
from seqforge.training.checkpoint import (
    HEADER_BYTES,
    decode_blob,
    encode_blob,
    load_checkpoint,
    save_checkpoint,
)
from seqforge.training.sweep import expand_grid, load_grid, summary_columns, validate_grid
from seqforge.utils.results import (
    RunManifest,
    content_hash,
    format_value,
    generate_summary_report,
    load_manifest,
    read_csv,
    save_confusion,
    save_manifest,
    save_metrics,
    write_csv,
)

# =============================================================================
# Writer Tests
# =============================================================================


class TestWriters:
    """Tests for CSV and manifest writers."""

    def test_format_value(self):
        """Test cell formatting."""
        assert format_value(None) == ""
        assert format_value(True) == "1"
        assert format_value(np.int64(3)) == "3"
        assert format_value(0.1) == "0.1"
        assert float(format_value(np.float64(1) / 3)) == 1 / 3

    def test_write_csv_creates_parents(self, tmp_path):
        """Test header order, missing cells and parent directories."""
        path = write_csv(tmp_path / "a" / "b.csv", ["x", "y"], [{"x": 1}, {"x": 2, "y": 0.5}])
        assert path.read_text(encoding="utf-8") == "x,y\n1,\n2,0.5\n"
        assert read_csv(path)[1] == {"x": "2", "y": "0.5"}
        assert not list(path.parent.glob(".*.tmp"))

    def test_manifest_is_write_once(self):
        """Test that an existing manifest is never overwritten."""
        with tempfile.TemporaryDirectory() as tmpdir:
            path = Path(tmpdir) / "manifest.json"
            manifest = RunManifest(command="train", config={"K": 3}, inputs={}, seed=5)
            save_manifest(manifest.finish(), path)

            loaded = load_manifest(path)
            assert loaded.seed == 5
            assert loaded.status == "ok"
            assert loaded.finished_at

            with pytest.raises(FileExistsError):
                save_manifest(manifest, path)

    def test_content_hash(self, tmp_path):
        """Test that the hash follows file content."""
        a = tmp_path / "a.txt"
        a.write_text("one", encoding="utf-8")
        first = content_hash([a])
        assert content_hash([a]) == first
        a.write_text("two", encoding="utf-8")
        assert content_hash([a]) != first


class TestReportFiles:
    """Tests for metrics, confusion and summary outputs."""

    @pytest.fixture
    def report(self):
        return precision_recall(np.array([0, 1, 1]), np.array([0, 1, 2]), config_hash="abc", seed=1)

    def test_metrics_csv(self, tmp_path, report):
        """Test the long-format metrics file."""
        rows = read_csv(save_metrics(report, tmp_path / "metrics.csv"))
        recall = {r["class"]: float(r["value"]) for r in rows if r["metric"] == "recall"}
        assert recall == {"Sustainer": 100.0, "Burnout": 100.0, "Churnout": 0.0, "macro": 200 / 3}
        assert {r["split"] for r in rows} == {"test"}

    def test_confusion_csv(self, tmp_path, report):
        """Test the confusion matrix layout."""
        text = save_confusion(report, tmp_path / "c.csv").read_text(encoding="utf-8")
        assert text.splitlines() == [
            "true,Sustainer,Burnout,Churnout",
            "Sustainer,1,0,0",
            "Burnout,0,1,0",
            "Churnout,0,1,0",
        ]

    def test_generate_summary_report(self, tmp_path, report):
        """Test report contents and saving."""
        path = tmp_path / "summary.txt"
        text = generate_summary_report([report], entropy_means=[2.5, 1.25], output_path=path)
        assert "TRAINING RESULTS SUMMARY" in text
        assert "Burnout" in text
        assert "(precision undefined)" in text
        assert "2.500, 1.250" in text
        assert path.read_text(encoding="utf-8") == text


# =============================================================================
# Configuration Tests
# =============================================================================


class TestTrainingConfig:
    """Tests for TrainingConfig."""

    def test_defaults(self):
        """Test default values."""
        config = TrainingConfig().validate()
        assert config.num_clusters == 7
        assert config.beta == 0.3
        assert config.latent_dim == 112
        assert config.interpreter_batch_size(12) == 96

    def test_file_keys(self):
        """Test short-name serialization."""
        values = TrainingConfig(num_clusters=4, lambda_=1.0).to_dict()
        for key in FILE_KEYS:
            assert key in values
        assert values["K"] == 4 and values["lambda"] == 1.0
        assert TrainingConfig.from_dict(values) == TrainingConfig(num_clusters=4, lambda_=1.0)

    def test_unknown_key(self):
        """Test that typos are rejected."""
        with pytest.raises(ConfigError, match="unknown config key"):
            TrainingConfig.from_dict({"k": 3})

    @pytest.mark.parametrize(
        "overrides",
        [
            {"beta": 0.0},
            {"beta": 1.5},
            {"lambda": -0.1},
            {"I": 0},
            {"K": 0},
            {"B2": 0},
            {"variant": "cnn"},
            {"hidden_sizes": [4, 4]},
            {"train_fraction": 0.0},
            {"interpreter_lr": 0.0},
        ],
    )
    def test_validation(self, overrides):
        """Test range checks."""
        with pytest.raises(ConfigError):
            TrainingConfig().replace(**overrides).validate()

    def test_beta_one_is_valid(self):
        """Test the upper bound of beta."""
        assert TrainingConfig(beta=1.0).validate().beta == 1.0

    def test_hash_tracks_values(self):
        """Test config hashing."""
        base = TrainingConfig()
        assert base.config_hash() == TrainingConfig().config_hash()
        assert base.config_hash() != base.replace(K=5).config_hash()


class TestConfiguration:
    """Tests for configuration loading."""

    def test_load_base_config(self):
        """Test that the shipped base equals the dataclass defaults."""
        assert resolve_config(load_base_config()) == TrainingConfig()

    def test_shipped_files(self):
        """Test listing presets, grids and generators."""
        assert {"quick_test", "acceptance"} <= set(list_presets())
        assert {"k_sweep", "lambda_sweep", "i_sweep", "beta_sweep"} <= set(list_grids())
        assert {"toy", "acceptance"} <= set(list_generators())

    def test_preset_inherits_base(self):
        """Test that unset keys come from the base file."""
        config = resolve_config(load_preset("quick_test"))
        assert config.num_clusters == 3
        assert config.beta == 0.3
        assert "beta" not in load_preset("quick_test", include_base=False)

    def test_load_preset_not_found(self):
        """Test loading a non-existent preset raises error."""
        with pytest.raises(FileNotFoundError):
            load_preset("nonexistent_preset_xyz")

    def test_config_file(self, tmp_path):
        """Test a user file merged over the base."""
        path = tmp_path / "mine.yaml"
        path.write_text("K: 5\nbeta: 0.5\n", encoding="utf-8")
        config = resolve_config(load_config_file(path))
        assert (config.num_clusters, config.beta, config.lambda_) == (5, 0.5, 0.5)

    def test_key_value_config_file(self, tmp_path):
        """Test flat key = value text with comments and blank lines."""
        path = tmp_path / "run.cfg"
        path.write_text(
            "# quick run\nK = 4\nlambda = 0.25\n\nI = 1  # refresh every step\n"
            "beta = 0.3\nvariant = s\nhidden_sizes = [8, 4, 2]\n",
            encoding="utf-8",
        )
        config = resolve_config(load_config_file(path))
        assert config.num_clusters == 4
        assert config.lambda_ == 0.25
        assert config.refresh_period == 1
        assert config.beta == 0.3
        assert config.variant == "s"
        assert config.hidden_sizes == (8, 4, 2)
        assert config.collaborative_epochs == TrainingConfig().collaborative_epochs

    def test_key_value_config_file_bad_line(self, tmp_path):
        """Test that a line without '=' names the line."""
        path = tmp_path / "run.cfg"
        path.write_text("K = 4\nbeta 0.3\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="run.cfg:2"):
            load_config_file(path)

    def test_config_file_not_mapping(self, tmp_path):
        """Test that a list file is rejected."""
        path = tmp_path / "bad.yaml"
        path.write_text("- 1\n- 2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            load_config_file(path)


class TestGrids:
    """Tests for sweep grids."""

    def test_expand(self):
        """Test the cartesian product in key order."""
        assert expand_grid({"K": [4, 5], "beta": [0.3]}) == [
            {"K": 4, "beta": 0.3},
            {"K": 5, "beta": 0.3},
        ]
        assert expand_grid({}) == [{}]

    def test_validate(self):
        """Test scalar promotion and key checks."""
        assert validate_grid({"beta": 0.5, "K": [3]}) == {"K": [3], "beta": [0.5]}
        with pytest.raises(ConfigError):
            validate_grid({"B2": [4]})
        with pytest.raises(ConfigError):
            validate_grid({"K": []})

    def test_shipped_grid(self):
        """Test a shipped grid file."""
        from seqforge.configs import grid_path

        assert load_grid(grid_path("k_sweep")) == {"K": [4, 5, 6, 7, 8]}

    def test_summary_columns(self):
        """Test summary table columns."""
        columns = summary_columns(["K"])
        assert columns[:3] == ["K", "Sustainer R mean%", "Sustainer P mean%"]
        assert columns[-2:] == ["runs_ok", "runs_failed"]


# =============================================================================
# Checkpoint Tests
# =============================================================================


class TestCheckpoint:
    """Tests for checkpoint blobs and directories."""

    def test_blob_layout(self):
        """Test the header and little-endian payload."""
        blob = encode_blob(np.arange(6, dtype=float).reshape(2, 3))
        header = np.frombuffer(blob[:HEADER_BYTES], dtype="<u2")
        assert header.tolist() == [2, 2, 3, 0, 0, 0, 0, 0]
        assert len(blob) == HEADER_BYTES + 6 * 8
        np.testing.assert_array_equal(decode_blob(blob), np.arange(6.0).reshape(2, 3))

    def test_scalar_blob(self):
        """Test a rank-0 tensor."""
        assert decode_blob(encode_blob(np.array(2.5))).shape == ()

    def test_corrupt_blob(self):
        """Test size and rank validation."""
        blob = encode_blob(np.ones(3))
        with pytest.raises(CheckpointError):
            decode_blob(blob[:-1])
        with pytest.raises(CheckpointError):
            decode_blob(blob[:4])
        with pytest.raises(CheckpointError):
            encode_blob(np.zeros((1,) * 8))

    def test_directory(self, tmp_path, rng):
        """Test saving and loading modules, arrays and metadata."""
        layer = Dense(3, 2, rng)
        centroids = rng.normal(size=(2, 4))
        path = save_checkpoint(
            tmp_path / "ckpt", {"layer": layer}, {"epoch": 2}, {"kmeans": {"centroids": centroids}}
        )
        checkpoint = load_checkpoint(path)
        assert checkpoint.meta["epoch"] == 2
        np.testing.assert_array_equal(checkpoint.group("kmeans")["centroids"], centroids)

        restored = Dense(3, 2, np.random.default_rng(99))
        checkpoint.load_into("layer", restored)
        assert restored.checksum() == layer.checksum()
        assert not (tmp_path / "ckpt.tmp").exists()

    def test_deterministic_bytes(self, tmp_path, rng):
        """Test that identical content gives identical files."""
        layer = Dense(2, 2, rng)
        a = save_checkpoint(tmp_path / "a", {"layer": layer}, {"epoch": 1})
        b = save_checkpoint(tmp_path / "b", {"layer": layer}, {"epoch": 1})
        for file in sorted(p.name for p in a.iterdir()):
            assert (a / file).read_bytes() == (b / file).read_bytes()

    def test_mismatched_model(self, tmp_path, rng):
        """Test loading into a model of another shape."""
        path = save_checkpoint(tmp_path / "ckpt", {"layer": Dense(3, 2, rng)}, {})
        with pytest.raises(CheckpointError):
            load_checkpoint(path).load_into("layer", Dense(4, 2, rng))
        with pytest.raises(CheckpointError):
            load_checkpoint(path).group("missing")

    def test_missing_or_corrupt(self, tmp_path, rng):
        """Test unreadable checkpoint directories."""
        with pytest.raises(CheckpointError):
            load_checkpoint(tmp_path / "nothing")
        path = save_checkpoint(tmp_path / "ckpt", {"layer": Dense(2, 2, rng)}, {})
        meta = json.loads((path / "meta.json").read_text(encoding="utf-8"))
        (path / meta["tensors"]["layer"]["weight"]["file"]).unlink()
        with pytest.raises(CheckpointError):
            load_checkpoint(path)
