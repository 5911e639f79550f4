#!/usr/bin/env python3
"""seqforge command line.

Subcommands:
    generate           Draw a synthetic dataset from a generator spec
    train              Collaborative training (or the disconnected ablation)
    sweep              Train a hyperparameter grid, several seeds per cell
    evaluate           Recompute metrics from a run's final checkpoint
    inspect            Cluster profiles and per-class transition matrices
    export-embeddings  Latent rows with their cluster ids as CSV

Examples:
    # Generate the acceptance dataset
    seqforge generate --spec acceptance --out data/players.jsonl --n-per-class 100

    # Quick training run
    seqforge train --data data/players.jsonl --preset quick_test --out runs/quick

    # Ablation with a different classifier mapping
    seqforge train --data data/players.jsonl --ablation --variant f --out runs/ablation

    # Sweep K with four worker threads
    seqforge sweep --data data/players.jsonl --grid k_sweep --out runs/k --jobs 4

Exit codes: 0 success, 1 runtime failure, 2 invalid input or configuration.
The SEQFORGE_SEED environment variable sets the seed when neither a flag
nor a config file does.
"""

import argparse
import os
import sys
import traceback
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple

from seqforge.configs import (
    generator_path,
    grid_path,
    load_base_config,
    load_config_file,
    load_preset,
    resolve_config,
)
from seqforge.core.base import TrainingConfig
from seqforge.core.constants import (
    CHECKPOINT_DIR,
    CLASS_NAMES,
    CONFUSION_FILE,
    DERIVED_MANIFEST_SUFFIX,
    EMBEDDINGS_FILE,
    ENTROPY_FILE,
    EXIT_INVALID_INPUT,
    EXIT_OK,
    EXIT_RUNTIME_FAILURE,
    FINAL_CHECKPOINT,
    LOSS_HISTORY_FILE,
    MANIFEST_FILE,
    METRICS_FILE,
    PLAYER_ENTROPY_FILE,
    PROFILES_FILE,
    SCHEMA_SIDECAR,
    SEED_ENV_VAR,
    SWEEP_RUNS_PER_CELL,
    TRANSITIONS_FILE,
)
from seqforge.core.exceptions import CheckpointError, ConfigError, DataFormatError, SeqforgeError
from seqforge.data.dataset import PlayerSample, compute_pad_length, load_dataset, prepare_dataset
from seqforge.data.schema import FeatureSchema, load_schema
from seqforge.data.synthetic import generate_synthetic, load_generator_spec, write_synthetic
from seqforge.evaluation.export import export_embeddings
from seqforge.evaluation.profiles import class_transition_means, cluster_profiles
from seqforge.evaluation.recovery import cluster_recovery
from seqforge.training.ablation import run_ablation
from seqforge.training.sweep import load_grid, sweep, sweep_outputs
from seqforge.training.trainer import (
    CollaborativeTrainer,
    assign_clusters,
    embed_players,
    primary_report,
    restore_trainer,
    score_trainer,
)
from seqforge.utils.logging import get_logger, set_log_level
from seqforge.utils.results import (
    RunManifest,
    content_hash,
    generate_summary_report,
    load_manifest,
    save_class_transitions,
    save_confusion,
    save_entropy_trace,
    save_loss_history,
    save_manifest,
    save_metrics,
    save_player_entropy,
    save_profiles,
)

logger = get_logger(__name__)

# CLI flag -> config key
CONFIG_FLAGS: Dict[str, str] = {
    "K": "K",
    "lambda_": "lambda",
    "beta": "beta",
    "I": "I",
    "B2": "B2",
    "collaborative_epochs": "collaborative_epochs",
    "interpreter_inner_epochs": "interpreter_inner_epochs",
    "classifier_inner_epochs": "classifier_inner_epochs",
    "interpreter_lr": "interpreter_lr",
    "classifier_lr": "classifier_lr",
    "train_fraction": "train_fraction",
    "variant": "variant",
    "hidden_sizes": "hidden_sizes",
    "attention_size": "attention_size",
    "conv_channels": "conv_channels",
    "recurrent_size": "recurrent_size",
}

INPUT_ERRORS = (ConfigError, DataFormatError, CheckpointError, FileNotFoundError, FileExistsError)


# =============================================================================
# Argument parsing
# =============================================================================


def _add_config_flags(parser: argparse.ArgumentParser) -> None:
    group = parser.add_argument_group("training configuration")
    group.add_argument(
        "--config", type=str, default=None, help="Config file (key = value lines or a YAML mapping)"
    )
    group.add_argument("--preset", type=str, default=None, help="Shipped preset name")
    group.add_argument("--K", type=int, default=None, help="Number of clusters")
    group.add_argument("--lambda", dest="lambda_", type=float, default=None, help="Trace weight")
    group.add_argument("--beta", type=float, default=None, help="Interpreter vs bridge balance")
    group.add_argument("--I", type=int, default=None, help="Indicator refresh period")
    group.add_argument("--B2", type=int, default=None, help="Players per batch")
    group.add_argument("--collaborative-epochs", type=int, default=None)
    group.add_argument("--interpreter-inner-epochs", type=int, default=None)
    group.add_argument("--classifier-inner-epochs", type=int, default=None)
    group.add_argument("--interpreter-lr", type=float, default=None)
    group.add_argument("--classifier-lr", type=float, default=None)
    group.add_argument("--train-fraction", type=float, default=None)
    group.add_argument("--variant", choices=["tm", "s", "f"], default=None)
    group.add_argument("--hidden-sizes", type=int, nargs=3, default=None)
    group.add_argument("--attention-size", type=int, default=None)
    group.add_argument("--conv-channels", type=int, nargs=2, default=None)
    group.add_argument("--recurrent-size", type=int, default=None)
    group.add_argument("--seed", type=int, default=None, help=f"Seed (fallback: ${SEED_ENV_VAR})")


def _add_data_flags(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--data", type=str, required=True, help="JSON-lines dataset")
    parser.add_argument(
        "--schema",
        type=str,
        default=None,
        help=f"Feature schema (default: {SCHEMA_SIDECAR} next to the dataset)",
    )


def parse_args(argv: Optional[Sequence[str]] = None) -> argparse.Namespace:
    """Parse command line arguments.

    Returns
    -------
    argparse.Namespace
        Parsed arguments.
    """
    parser = argparse.ArgumentParser(
        prog="seqforge",
        description="Collaborative interpreter/classifier training on sequences of sequences",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog=__doc__,
    )
    parser.add_argument(
        "--log-level",
        type=str,
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        default="INFO",
        help="Logging level (default: INFO)",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    gen = sub.add_parser("generate", help="Generate a synthetic dataset")
    gen.add_argument("--spec", type=str, required=True, help="Spec file or shipped spec name")
    gen.add_argument("--out", type=str, required=True, help="Dataset path (.jsonl)")
    gen.add_argument("--n-per-class", type=int, required=True)
    gen.add_argument("--seed", type=int, default=None)

    train = sub.add_parser("train", help="Train a model")
    _add_data_flags(train)
    train.add_argument("--out", type=str, required=True, help="Run directory")
    train.add_argument("--ablation", action="store_true", help="Disconnected baseline")
    _add_config_flags(train)

    sw = sub.add_parser("sweep", help="Hyperparameter sweep")
    _add_data_flags(sw)
    sw.add_argument("--grid", type=str, required=True, help="Grid file or shipped grid name")
    sw.add_argument("--out", type=str, required=True, help="Sweep directory")
    sw.add_argument("--runs", type=int, default=SWEEP_RUNS_PER_CELL, help="Seeds per cell")
    sw.add_argument("--jobs", type=int, default=1, help="Worker threads")
    _add_config_flags(sw)

    for name, help_text in (
        ("evaluate", "Metrics from a run's final checkpoint"),
        ("inspect", "Cluster profiles and transition summaries"),
        ("export-embeddings", "Latent rows and cluster ids as CSV"),
    ):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("--run", type=str, required=True, help="Run directory")
        p.add_argument("--data", type=str, default=None, help="Dataset (default: from manifest)")
        p.add_argument("--schema", type=str, default=None)
        p.add_argument("--out", type=str, default=None, help="Output path")

    return parser.parse_args(argv)


# =============================================================================
# Shared helpers
# =============================================================================


def resolve_training_config(args: argparse.Namespace) -> TrainingConfig:
    """Base config < preset < config file < flags; seed falls back to the environment.

    Raises
    ------
    ConfigError
        If the merged values are invalid.
    """
    values = load_base_config()
    explicit: Dict[str, Any] = {}
    if args.preset:
        explicit.update(load_preset(args.preset, include_base=False))
    if args.config:
        explicit.update(load_config_file(args.config, include_base=False))
    values.update(explicit)
    for attr, key in CONFIG_FLAGS.items():
        value = getattr(args, attr, None)
        if value is not None:
            values[key] = value
    if args.seed is not None:
        values["seed"] = args.seed
    elif "seed" not in explicit and os.environ.get(SEED_ENV_VAR):
        try:
            values["seed"] = int(os.environ[SEED_ENV_VAR])
        except ValueError:
            raise ConfigError(f"{SEED_ENV_VAR} must be an integer") from None
    return resolve_config(values)


def load_inputs(data: str, schema: Optional[str]) -> Tuple[List[PlayerSample], FeatureSchema, Path, Path]:
    """Load the dataset and its schema.

    Raises
    ------
    FileNotFoundError
        If either file is missing.
    DataFormatError
        If either file is malformed or no sequence holds a game.
    """
    data_path = Path(data)
    if not data_path.exists():
        raise FileNotFoundError(f"Dataset not found: {data_path}")
    schema_path = Path(schema) if schema else data_path.with_name(SCHEMA_SIDECAR)
    feature_schema = load_schema(schema_path)
    samples = load_dataset(data_path, feature_schema)
    if not samples:
        raise DataFormatError(f"{data_path} holds no players")
    compute_pad_length(samples)
    return samples, feature_schema, data_path, schema_path


def _check_fresh_run_dir(out_dir: Path) -> None:
    if (out_dir / MANIFEST_FILE).exists():
        raise FileExistsError(f"{out_dir} already holds a finished run; choose a new directory")


def _run_inputs(args: argparse.Namespace) -> Tuple[List[PlayerSample], FeatureSchema, Path]:
    run_dir = Path(args.run)
    manifest_path = run_dir / MANIFEST_FILE
    data, schema = args.data, args.schema
    if manifest_path.exists():
        manifest = load_manifest(manifest_path)
        data = data or manifest.inputs.get("data")
        schema = schema or manifest.inputs.get("schema")
    if not data:
        raise FileNotFoundError(f"no dataset given and no manifest in {run_dir}")
    samples, feature_schema, _, _ = load_inputs(data, schema)
    return samples, feature_schema, run_dir


def _restore(args: argparse.Namespace) -> CollaborativeTrainer:
    samples, schema, run_dir = _run_inputs(args)
    return restore_trainer(run_dir / CHECKPOINT_DIR / FINAL_CHECKPOINT, samples, schema)


def record_derived_outputs(
    command: str, trainer: CollaborativeTrainer, run_dir: Path, paths: Sequence[Path]
) -> Path:
    """Manifest for files derived from a finished run, beside the first file.

    Derived files are rewritten on every call, and so is this manifest;
    the run's own manifest is left untouched.
    """
    out_dir = Path(paths[0]).parent
    run_manifest = run_dir / MANIFEST_FILE
    manifest = RunManifest(
        command=command,
        config=trainer.config.to_dict(),
        inputs={"run": str(run_dir)},
        seed=trainer.config.seed,
        input_hash=content_hash([run_manifest]) if run_manifest.exists() else "",
        outputs=[Path(os.path.relpath(p, out_dir)).as_posix() for p in paths],
    )
    return save_manifest(
        manifest.finish("ok"), out_dir / f"{command}{DERIVED_MANIFEST_SUFFIX}", overwrite=True
    )


def write_run_artifacts(trainer: CollaborativeTrainer, out_dir: Path) -> List[str]:
    """Loss history, metrics, entropy traces, embeddings and the text summary.

    Returns
    -------
    List[str]
        File names written, relative to ``out_dir``.
    """
    state = trainer.state
    prepared = trainer.prepared
    reports = score_trainer(trainer)
    report = primary_report(reports)
    save_loss_history(state.history, out_dir / LOSS_HISTORY_FILE)
    save_metrics(list(reports.values()), out_dir / METRICS_FILE)
    save_confusion(report, out_dir / CONFUSION_FILE)
    save_entropy_trace(state.entropy, out_dir / ENTROPY_FILE)
    save_player_entropy(state.entropy, prepared.player_ids, out_dir / PLAYER_ENTROPY_FILE)

    real = prepared.real_mask
    players, positions = real.nonzero()
    export_embeddings(
        state.latents[real],
        state.cluster_ids[real],
        out_dir / EMBEDDINGS_FILE,
        [prepared.player_ids[p] for p in players],
        positions,
    )
    recovery = None
    if prepared.has_archetypes:
        recovery = cluster_recovery(state.cluster_ids[real], prepared.archetypes[real])
        logger.info(f"Archetype recovery ARI={recovery:.4f}")
    text = generate_summary_report(
        list(reports.values()),
        entropy_means=state.entropy.mean_bits,
        saturated=state.saturated() if trainer.config.collaborative_epochs > 1 else None,
        recovery=recovery,
        output_path=out_dir / "summary.txt",
    )
    print(text)
    return [
        LOSS_HISTORY_FILE,
        METRICS_FILE,
        CONFUSION_FILE,
        ENTROPY_FILE,
        PLAYER_ENTROPY_FILE,
        EMBEDDINGS_FILE,
        "summary.txt",
    ] + [str(Path(p).relative_to(out_dir)) for p in state.checkpoints]


# =============================================================================
# Commands
# =============================================================================


def cmd_generate(args: argparse.Namespace) -> int:
    spec_file = Path(args.spec)
    if not spec_file.exists() and not spec_file.suffix:
        spec_file = generator_path(args.spec)
    spec = load_generator_spec(spec_file)
    if args.n_per_class < 1:
        raise ConfigError(f"--n-per-class must be >= 1, got {args.n_per_class}")
    seed = args.seed
    if seed is None:
        env = os.environ.get(SEED_ENV_VAR)
        seed = int(env) if env else spec.seed
    samples = generate_synthetic(spec, args.n_per_class, seed=seed)
    path = write_synthetic(samples, spec, args.out, args.n_per_class, seed)
    print(f"Wrote {len(samples)} players to {path}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    # validate everything before the run directory exists
    config = resolve_training_config(args)
    samples, schema, data_path, schema_path = load_inputs(args.data, args.schema)
    out_dir = Path(args.out)
    _check_fresh_run_dir(out_dir)

    manifest = RunManifest(
        command="train --ablation" if args.ablation else "train",
        config=config.to_dict(),
        inputs={"data": str(data_path), "schema": str(schema_path)},
        seed=config.seed,
        input_hash=content_hash([data_path, schema_path]),
    )
    prepared = prepare_dataset(samples, schema, config.train_fraction, config.seed)
    out_dir.mkdir(parents=True, exist_ok=True)
    try:
        if args.ablation:
            trainer = run_ablation(prepared, config, out_dir).trainer
        else:
            trainer = CollaborativeTrainer(prepared, config, out_dir)
            trainer.run()
        manifest.outputs = write_run_artifacts(trainer, out_dir)
    except (SeqforgeError, OSError, ArithmeticError):
        save_manifest(manifest.finish("failed"), out_dir / MANIFEST_FILE)
        raise
    save_manifest(manifest.finish("ok"), out_dir / MANIFEST_FILE)
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    config = resolve_training_config(args)
    grid_file = Path(args.grid)
    if not grid_file.exists() and not grid_file.suffix:
        grid_file = grid_path(args.grid)
    grid = load_grid(grid_file)
    samples, schema, data_path, schema_path = load_inputs(args.data, args.schema)
    out_dir = Path(args.out)
    _check_fresh_run_dir(out_dir)
    if args.runs < 1 or args.jobs < 1:
        raise ConfigError("--runs and --jobs must be >= 1")

    manifest = RunManifest(
        command="sweep",
        config=dict(config.to_dict(), grid=grid, runs=args.runs),
        inputs={"data": str(data_path), "schema": str(schema_path), "grid": str(grid_file)},
        seed=config.seed,
        input_hash=content_hash([data_path, schema_path, grid_file]),
    )
    rows = sweep(samples, schema, config, grid, out_dir, runs=args.runs, jobs=args.jobs)
    manifest.outputs = sweep_outputs(out_dir)
    save_manifest(manifest.finish("ok"), out_dir / MANIFEST_FILE)
    for row in rows:
        cell = ", ".join(f"{k}={row[k]}" for k in grid)
        macro = row.get("macro R mean%")
        shown = f"{macro:.2f}" if macro is not None else "n/a"
        print(f"{cell or 'default'}: macro R {shown}% ({row['runs_ok']} ok, {row['runs_failed']} failed)")
    return EXIT_OK


def cmd_evaluate(args: argparse.Namespace) -> int:
    trainer = _restore(args)
    reports = score_trainer(trainer)
    print(generate_summary_report(list(reports.values()), title="EVALUATION"))
    if args.out:
        path = save_metrics(list(reports.values()), args.out)
        record_derived_outputs("evaluate", trainer, Path(args.run), [path])
    return EXIT_OK


def _final_assignments(trainer: CollaborativeTrainer):
    prepared = trainer.prepared
    assert trainer.state.cluster_model is not None
    latents = embed_players(
        trainer.interpreter,
        prepared,
        list(range(prepared.n_players)),
        trainer.config.players_per_batch,
    )
    ids = assign_clusters(trainer.state.cluster_model, latents, prepared.real_mask)
    return latents, ids


def cmd_inspect(args: argparse.Namespace) -> int:
    trainer = _restore(args)
    prepared = trainer.prepared
    k = trainer.config.num_clusters
    _, ids = _final_assignments(trainer)
    profiles = cluster_profiles(prepared.raw, prepared.valid_lengths, ids, k)
    means = class_transition_means(ids, prepared.real_mask, prepared.labels, k)

    columns = prepared.schema.column_names
    print("=" * 70)
    print("CLUSTER PROFILES (raw feature means)")
    print("=" * 70)
    for profile in profiles:
        line = f"cluster {profile.cluster_id}: {profile.count} sequences"
        if profile.count:
            line += f", mean length {profile.mean_length:.1f}"
            line += ", " + ", ".join(
                f"{c}={v:.2f}" for c, v in zip(columns, profile.mean)
            )
        print(line)
    print("=" * 70)
    print("MEAN TRANSITION MATRIX PER CLASS")
    print("=" * 70)
    for c, name in enumerate(CLASS_NAMES):
        print(f"{name}:")
        for row in means[c]:
            print("  " + " ".join(f"{v:.3f}" for v in row))

    out_dir = Path(args.out) if args.out else Path(args.run) / "inspect"
    written = [
        save_profiles(profiles, columns, out_dir / PROFILES_FILE),
        save_class_transitions(means, out_dir / TRANSITIONS_FILE),
    ]
    record_derived_outputs("inspect", trainer, Path(args.run), written)
    return EXIT_OK


def cmd_export_embeddings(args: argparse.Namespace) -> int:
    trainer = _restore(args)
    prepared = trainer.prepared
    latents, ids = _final_assignments(trainer)
    real = prepared.real_mask
    players, positions = real.nonzero()
    out = Path(args.out) if args.out else Path(args.run) / "export" / EMBEDDINGS_FILE
    path = export_embeddings(
        latents[real], ids[real], out, [prepared.player_ids[p] for p in players], positions
    )
    record_derived_outputs("export-embeddings", trainer, Path(args.run), [path])
    print(f"Wrote {int(real.sum())} embeddings to {path}")
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "train": cmd_train,
    "sweep": cmd_sweep,
    "evaluate": cmd_evaluate,
    "inspect": cmd_inspect,
    "export-embeddings": cmd_export_embeddings,
}


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point.

    Returns
    -------
    int
        Exit code (0 success, 1 runtime failure, 2 invalid input).
    """
    args = parse_args(argv)
    set_log_level(args.log_level)
    try:
        return COMMANDS[args.command](args)
    except INPUT_ERRORS as e:
        logger.error(str(e))
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID_INPUT
    except (SeqforgeError, OSError, ArithmeticError) as e:
        logger.error(f"{args.command} failed: {e}")
        if args.log_level == "DEBUG":
            traceback.print_exc()
        return EXIT_RUNTIME_FAILURE


if __name__ == "__main__":
    sys.exit(main())
