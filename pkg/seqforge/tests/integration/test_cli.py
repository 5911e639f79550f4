"""Integration tests for the seqforge command line.

Tests for:
- generate, train, sweep, evaluate, inspect and export-embeddings
- Exit codes for invalid input
- Write-once run directories and manifests
- Deterministic artifacts and the seed environment variable
"""

import pytest
import yaml

from seqforge.core.constants import (
    CHECKPOINT_DIR,
    DERIVED_MANIFEST_SUFFIX,
    EMBEDDINGS_FILE,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    FINAL_CHECKPOINT,
    LOSS_HISTORY_FILE,
    MANIFEST_FILE,
    METRICS_FILE,
    PROFILES_FILE,
    SCHEMA_SIDECAR,
    SEED_ENV_VAR,
    SPEC_SIDECAR,
    TRANSITIONS_FILE,
)
from seqforge.data.dataset import load_dataset
from seqforge.data.schema import load_schema
from seqforge.scripts.cli import main
from seqforge.utils.results import load_manifest, read_csv

TINY_CONFIG = {
    "K": 2,
    "lambda": 0.5,
    "beta": 0.3,
    "I": 2,
    "B2": 4,
    "collaborative_epochs": 2,
    "interpreter_inner_epochs": 1,
    "classifier_inner_epochs": 2,
    "interpreter_lr": 0.01,
    "classifier_lr": 0.01,
    "hidden_sizes": [3, 2, 2],
    "attention_size": 2,
    "conv_channels": [2, 2],
    "recurrent_size": 3,
    "train_fraction": 0.75,
}


@pytest.fixture
def config_file(tmp_path):
    path = tmp_path / "tiny.yaml"
    path.write_text(yaml.safe_dump(TINY_CONFIG), encoding="utf-8")
    return path


@pytest.fixture
def train_args(toy_dataset_file, config_file):
    def build(out, *extra):
        return [
            "--log-level",
            "WARNING",
            "train",
            "--data",
            str(toy_dataset_file),
            "--config",
            str(config_file),
            "--out",
            str(out),
            *extra,
        ]

    return build


@pytest.fixture
def run_dir(tmp_path, train_args):
    out = tmp_path / "run"
    assert main(train_args(out, "--seed", "7")) == EXIT_OK
    return out


# =============================================================================
# Generate
# =============================================================================


class TestGenerate:
    """Tests for ``seqforge generate``."""

    def test_shipped_spec(self, tmp_path, toy_spec):
        """Test writing the toy dataset with its sidecars."""
        out = tmp_path / "gen" / "players.jsonl"
        code = main(["generate", "--spec", "toy", "--out", str(out), "--n-per-class", "2"])
        assert code == EXIT_OK
        assert (out.parent / SCHEMA_SIDECAR).exists()
        assert (out.parent / SPEC_SIDECAR).exists()
        samples = load_dataset(out, load_schema(out.parent / SCHEMA_SIDECAR))
        assert len(samples) == 6
        assert all(len(s.sequences) == toy_spec.sequences_per_player for s in samples)

    def test_seed_flag_is_deterministic(self, tmp_path):
        """Test that the same seed writes the same file."""
        paths = [tmp_path / name / "p.jsonl" for name in ("a", "b")]
        for path in paths:
            main(["generate", "--spec", "toy", "--out", str(path), "--n-per-class", "2", "--seed", "9"])
        assert paths[0].read_bytes() == paths[1].read_bytes()

    def test_invalid_spec(self, tmp_path):
        """Test that transition rows not summing to one are rejected."""
        spec = {
            "feature_names": ["x"],
            "means": [[0.0], [1.0]],
            "stds": 0.5,
            "length_ranges": [1, 2],
            "sequences_per_player": 2,
            "transitions": {
                "Sustainer": [[1.0, 0.0], [0.0, 1.0]],
                "Burnout": [[0.2, 0.7], [0.1, 0.9]],
                "Churnout": [[0.5, 0.5], [0.5, 0.5]],
            },
        }
        spec_file = tmp_path / "bad.yaml"
        spec_file.write_text(yaml.safe_dump(spec), encoding="utf-8")
        out = tmp_path / "gen" / "p.jsonl"
        code = main(["generate", "--spec", str(spec_file), "--out", str(out), "--n-per-class", "2"])
        assert code == EXIT_INVALID_INPUT
        assert not out.exists()

    def test_unknown_spec_name(self, tmp_path):
        """Test a shipped spec name that does not exist."""
        code = main(
            ["generate", "--spec", "nope", "--out", str(tmp_path / "p.jsonl"), "--n-per-class", "1"]
        )
        assert code == EXIT_INVALID_INPUT


# =============================================================================
# Train
# =============================================================================


class TestTrain:
    """Tests for ``seqforge train``."""

    def test_artifacts(self, run_dir, toy_dataset_file):
        """Test the files of a finished run and its manifest."""
        for name in (
            MANIFEST_FILE,
            LOSS_HISTORY_FILE,
            METRICS_FILE,
            "confusion.csv",
            "entropy_trace.csv",
            "player_entropy.csv",
            EMBEDDINGS_FILE,
            "summary.txt",
        ):
            assert (run_dir / name).exists(), name
        assert (run_dir / CHECKPOINT_DIR / FINAL_CHECKPOINT).is_dir()

        manifest = load_manifest(run_dir / MANIFEST_FILE)
        assert manifest.status == "ok"
        assert manifest.seed == 7
        assert manifest.config["K"] == 2
        assert manifest.inputs["data"] == str(toy_dataset_file)
        assert f"{CHECKPOINT_DIR}/{FINAL_CHECKPOINT}" in manifest.outputs

        splits = {row["split"] for row in read_csv(run_dir / METRICS_FILE)}
        assert splits == {"test", "train"}
        # 12 players x 4 sequences, none padded
        assert len(read_csv(run_dir / EMBEDDINGS_FILE)) == 48
        assert "Archetype recovery (ARI)" in (run_dir / "summary.txt").read_text(encoding="utf-8")

    def test_deterministic(self, run_dir, tmp_path, train_args):
        """Test that a second run with the same seed writes identical artifacts."""
        again = tmp_path / "again"
        assert main(train_args(again, "--seed", "7")) == EXIT_OK
        for name in (LOSS_HISTORY_FILE, METRICS_FILE, EMBEDDINGS_FILE):
            assert (again / name).read_bytes() == (run_dir / name).read_bytes(), name
        first = run_dir / CHECKPOINT_DIR / FINAL_CHECKPOINT
        second = again / CHECKPOINT_DIR / FINAL_CHECKPOINT
        names = sorted(p.name for p in first.iterdir())
        assert names == sorted(p.name for p in second.iterdir())
        for name in names:
            assert (first / name).read_bytes() == (second / name).read_bytes(), name

    def test_existing_run_refused(self, run_dir, train_args):
        """Test that a finished run directory is never overwritten."""
        before = (run_dir / MANIFEST_FILE).read_bytes()
        assert main(train_args(run_dir)) == EXIT_INVALID_INPUT
        assert (run_dir / MANIFEST_FILE).read_bytes() == before

    def test_missing_data(self, tmp_path, config_file):
        """Test exit code 2 and no run directory for a missing dataset."""
        out = tmp_path / "run"
        code = main(
            ["train", "--data", str(tmp_path / "none.jsonl"), "--config", str(config_file), "--out", str(out)]
        )
        assert code == EXIT_INVALID_INPUT
        assert not out.exists()

    def test_key_value_config(self, tmp_path, toy_dataset_file):
        """Test a config file written as key = value lines."""
        config = tmp_path / "tiny.cfg"
        lines = [f"{key} = {value}" for key, value in TINY_CONFIG.items()]
        config.write_text("# tiny run\n" + "\n".join(lines) + "\n", encoding="utf-8")
        out = tmp_path / "kv"
        code = main(
            ["train", "--data", str(toy_dataset_file), "--config", str(config), "--out", str(out)]
        )
        assert code == EXIT_OK
        manifest = load_manifest(out / MANIFEST_FILE)
        assert manifest.config["K"] == 2
        assert manifest.config["hidden_sizes"] == [3, 2, 2]

    def test_dataset_without_games(self, tmp_path, toy_dataset_file, config_file):
        """Test exit code 2 when every sequence is empty."""
        data = toy_dataset_file.with_name("empty.jsonl")
        data.write_text(
            '{"player_id": "a", "label": "Sustainer", "sequences": [[], []]}\n'
            '{"player_id": "b", "label": "Churnout", "sequences": [[]]}\n',
            encoding="utf-8",
        )
        for command in ("train", "sweep"):
            out = tmp_path / command
            args = [command, "--data", str(data), "--config", str(config_file), "--out", str(out)]
            if command == "sweep":
                args += ["--grid", "k_sweep"]
            assert main(args) == EXIT_INVALID_INPUT
            assert not out.exists()

    def test_invalid_flag_value(self, tmp_path, train_args):
        """Test that an invalid hyperparameter is rejected before training."""
        out = tmp_path / "run"
        assert main(train_args(out, "--beta", "1.5")) == EXIT_INVALID_INPUT
        assert not out.exists()

    def test_seed_from_environment(self, tmp_path, train_args, monkeypatch):
        """Test that the environment seed applies when nothing else sets one."""
        monkeypatch.setenv(SEED_ENV_VAR, "11")
        out = tmp_path / "env"
        assert main(train_args(out)) == EXIT_OK
        assert load_manifest(out / MANIFEST_FILE).seed == 11

    def test_seed_flag_beats_environment(self, tmp_path, train_args, monkeypatch):
        """Test that an explicit flag wins over the environment."""
        monkeypatch.setenv(SEED_ENV_VAR, "11")
        out = tmp_path / "flag"
        assert main(train_args(out, "--seed", "5")) == EXIT_OK
        assert load_manifest(out / MANIFEST_FILE).seed == 5

    def test_ablation(self, tmp_path, train_args):
        """Test the disconnected baseline through the CLI."""
        out = tmp_path / "ablation"
        assert main(train_args(out, "--ablation")) == EXIT_OK
        manifest = load_manifest(out / MANIFEST_FILE)
        assert manifest.command == "train --ablation"
        phases = {row["phase"] for row in read_csv(out / LOSS_HISTORY_FILE)}
        assert phases >= {"interpreter", "ablation_run1", "ablation_run2"}
        assert (out / CHECKPOINT_DIR / FINAL_CHECKPOINT).is_dir()


# =============================================================================
# Sweep
# =============================================================================


class TestSweepCommand:
    """Tests for ``seqforge sweep``."""

    def test_grid_file(self, tmp_path, toy_dataset_file, config_file):
        """Test a two-cell sweep from a grid file."""
        grid = tmp_path / "grid.yaml"
        grid.write_text(yaml.safe_dump({"K": [2, 3]}), encoding="utf-8")
        out = tmp_path / "sweep"
        code = main(
            [
                "sweep",
                "--data",
                str(toy_dataset_file),
                "--config",
                str(config_file),
                "--collaborative-epochs",
                "1",
                "--grid",
                str(grid),
                "--runs",
                "1",
                "--out",
                str(out),
            ]
        )
        assert code == EXIT_OK
        rows = read_csv(out / "sweep_summary.csv")
        assert [row["K"] for row in rows] == ["2", "3"]
        manifest = load_manifest(out / MANIFEST_FILE)
        assert manifest.command == "sweep"
        assert manifest.outputs == [
            "sweep_summary.csv",
            f"cell_00/run_0/{METRICS_FILE}",
            f"cell_01/run_0/{METRICS_FILE}",
        ]

    def test_unknown_grid_key(self, tmp_path, toy_dataset_file):
        """Test that non-sweepable keys are rejected."""
        grid = tmp_path / "grid.yaml"
        grid.write_text(yaml.safe_dump({"epochs": [1, 2]}), encoding="utf-8")
        code = main(
            ["sweep", "--data", str(toy_dataset_file), "--grid", str(grid), "--out", str(tmp_path / "s")]
        )
        assert code == EXIT_INVALID_INPUT


# =============================================================================
# Commands on a finished run
# =============================================================================


class TestRunCommands:
    """Tests for evaluate, inspect and export-embeddings."""

    def test_evaluate_matches_training(self, run_dir, tmp_path):
        """Test that evaluation reproduces the training metrics exactly."""
        out = tmp_path / "eval.csv"
        assert main(["evaluate", "--run", str(run_dir), "--out", str(out)]) == EXIT_OK
        assert read_csv(out) == read_csv(run_dir / METRICS_FILE)

    def test_inspect(self, run_dir):
        """Test profile and transition tables."""
        assert main(["inspect", "--run", str(run_dir)]) == EXIT_OK
        profiles = read_csv(run_dir / "inspect" / PROFILES_FILE)
        counts = {}
        for row in profiles:
            counts[row["cluster_id"]] = int(row["count"])
        assert set(counts) == {"0", "1"}
        assert sum(counts.values()) == 48
        transitions = read_csv(run_dir / "inspect" / TRANSITIONS_FILE)
        assert {row["class"] for row in transitions} == {"Sustainer", "Burnout", "Churnout"}

    def test_derived_outputs_are_recorded(self, run_dir):
        """Test manifests beside inspect and export outputs, leaving the run manifest alone."""
        before = (run_dir / MANIFEST_FILE).read_bytes()
        for _ in range(2):
            assert main(["inspect", "--run", str(run_dir)]) == EXIT_OK
        assert main(["export-embeddings", "--run", str(run_dir)]) == EXIT_OK
        inspected = load_manifest(run_dir / "inspect" / f"inspect{DERIVED_MANIFEST_SUFFIX}")
        assert inspected.outputs == [PROFILES_FILE, TRANSITIONS_FILE]
        assert inspected.inputs == {"run": str(run_dir)}
        assert inspected.seed == 7
        exported = load_manifest(run_dir / "export" / f"export-embeddings{DERIVED_MANIFEST_SUFFIX}")
        assert exported.outputs == [EMBEDDINGS_FILE]
        assert (run_dir / MANIFEST_FILE).read_bytes() == before

    def test_export_embeddings(self, run_dir):
        """Test that exported rows match the training run's embeddings."""
        assert main(["export-embeddings", "--run", str(run_dir)]) == EXIT_OK
        exported = run_dir / "export" / EMBEDDINGS_FILE
        assert exported.read_bytes() == (run_dir / EMBEDDINGS_FILE).read_bytes()

    def test_missing_run(self, tmp_path):
        """Test a run directory without manifest or dataset."""
        assert main(["evaluate", "--run", str(tmp_path / "none")]) == EXIT_INVALID_INPUT
