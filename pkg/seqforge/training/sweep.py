"""Hyperparameter sweeps over K, lambda, I and beta.

Every grid cell is trained with several seeds (``base seed + run``) and the
held-out per-class recall and precision are averaged into one summary row.
Each run gets its own directory ``cell_XX/run_R`` holding ``metrics.csv``;
a rerun over the same output directory reuses completed runs, so an
interrupted sweep resumes where it stopped.
"""

import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import yaml

from seqforge.core.base import TrainingConfig
from seqforge.core.constants import (
    CLASS_NAMES,
    METRICS_FILE,
    SWEEP_RUNS_PER_CELL,
    SWEEP_SUMMARY_FILE,
)
from seqforge.core.exceptions import ConfigError, SeqforgeError
from seqforge.data.dataset import PlayerSample, prepare_dataset
from seqforge.data.schema import FeatureSchema
from seqforge.training.trainer import CollaborativeTrainer, primary_report, score_trainer
from seqforge.utils.logging import get_logger
from seqforge.utils.results import atomic_write_text, read_csv, save_metrics, write_csv

logger = get_logger(__name__)

GRID_KEYS: Tuple[str, ...] = ("K", "lambda", "I", "beta")
ERROR_FILE = "error.txt"


def load_grid(path: Union[str, Path]) -> Dict[str, List[Any]]:
    """Read a YAML grid ``{K: [4, 5], beta: [0.3]}``.

    Raises
    ------
    ConfigError
        If the file is not a mapping of the sweepable keys to lists.
    """
    with open(Path(path), "r", encoding="utf-8") as f:
        grid = yaml.safe_load(f) or {}
    return validate_grid(grid)


def validate_grid(grid: Dict[str, Any]) -> Dict[str, List[Any]]:
    if not isinstance(grid, dict):
        raise ConfigError(f"grid must be a mapping, got {type(grid).__name__}")
    unknown = set(grid) - set(GRID_KEYS)
    if unknown:
        raise ConfigError(
            f"grid keys must be a subset of {list(GRID_KEYS)}, got {sorted(unknown)}"
        )
    out: Dict[str, List[Any]] = {}
    for key in GRID_KEYS:
        if key not in grid:
            continue
        values = grid[key]
        if not isinstance(values, list):
            values = [values]
        if not values:
            raise ConfigError(f"grid entry {key!r} has no values")
        out[key] = values
    return out


def expand_grid(grid: Dict[str, List[Any]]) -> List[Dict[str, Any]]:
    """Cartesian product of the grid, in key order; an empty grid is one default cell.

    Examples
    --------
    >>> expand_grid({"K": [4, 5], "beta": [0.3]})
    [{'K': 4, 'beta': 0.3}, {'K': 5, 'beta': 0.3}]
    >>> expand_grid({})
    [{}]
    """
    keys = list(grid)
    return [dict(zip(keys, combo)) for combo in itertools.product(*(grid[k] for k in keys))]


def summary_columns(grid_keys: Sequence[str]) -> List[str]:
    """Grid parameters, then recall and precision per class, then macro averages."""
    columns = list(grid_keys)
    for name in CLASS_NAMES:
        columns += [f"{name} R mean%", f"{name} P mean%"]
    return columns + ["macro R mean%", "macro P mean%", "runs_ok", "runs_failed"]


@dataclass
class RunOutcome:
    """Per-class recall/precision of one seeded run, or its failure."""

    cell: int
    run: int
    recall: Optional[np.ndarray] = None
    precision: Optional[np.ndarray] = None
    error: Optional[str] = None


def _read_run_metrics(path: Path) -> Tuple[np.ndarray, np.ndarray]:
    rows = read_csv(path)
    split = rows[0]["split"] if rows else ""
    values = {
        (r["class"], r["metric"]): float(r["value"]) for r in rows if r["split"] == split
    }
    recall = np.array([values[(name, "recall")] for name in CLASS_NAMES])
    precision = np.array([values[(name, "precision")] for name in CLASS_NAMES])
    return recall, precision


def _execute_run(
    samples: Sequence[PlayerSample],
    schema: FeatureSchema,
    config: TrainingConfig,
    run_dir: Path,
    cell: int,
    run: int,
) -> RunOutcome:
    metrics_path = run_dir / METRICS_FILE
    if metrics_path.exists():
        logger.info(f"Reusing completed run {run_dir}")
        recall, precision = _read_run_metrics(metrics_path)
        return RunOutcome(cell, run, recall, precision)
    try:
        prepared = prepare_dataset(samples, schema, config.train_fraction, config.seed)
        trainer = CollaborativeTrainer(prepared, config)
        trainer.run()
        report = primary_report(score_trainer(trainer))
    except (SeqforgeError, ValueError, ArithmeticError) as e:
        logger.warning(f"Sweep cell {cell} run {run} failed: {e}")
        atomic_write_text(run_dir / ERROR_FILE, f"{type(e).__name__}: {e}\n")
        return RunOutcome(cell, run, error=str(e))
    save_metrics(report, metrics_path)
    return RunOutcome(cell, run, report.recall, report.precision)


def sweep(
    samples: Sequence[PlayerSample],
    schema: FeatureSchema,
    base_config: TrainingConfig,
    grid: Dict[str, List[Any]],
    out_dir: Union[str, Path],
    runs: int = SWEEP_RUNS_PER_CELL,
    jobs: int = 1,
) -> List[Dict[str, Any]]:
    """Train every grid cell ``runs`` times and write the summary table.

    Parameters
    ----------
    samples : Sequence[PlayerSample]
        Raw (unpadded) dataset; each run prepares it with its own seed.
    schema : FeatureSchema
        Encoding schema.
    base_config : TrainingConfig
        Values for everything the grid does not set.
    grid : Dict[str, List[Any]]
        Values per sweepable key.
    out_dir : Union[str, Path]
        Sweep directory.
    runs : int
        Seeds per cell (``base_config.seed + r``).
    jobs : int
        Worker threads; runs are independent.

    Returns
    -------
    List[Dict[str, Any]]
        Summary rows, one per cell, also written to ``sweep_summary.csv``.

    Raises
    ------
    ConfigError
        If the grid is invalid or a cell's config fails validation.
    """
    grid = validate_grid(grid)
    out_dir = Path(out_dir)
    cells = expand_grid(grid)
    configs = []
    for cell in cells:
        cell_config = base_config.replace(**cell).validate()
        configs.append([cell_config.replace(seed=cell_config.seed + r) for r in range(runs)])
    logger.info(f"Sweep: {len(cells)} cells x {runs} runs, {jobs} worker(s)")

    tasks = [
        (c, r, configs[c][r], out_dir / f"cell_{c:02d}" / f"run_{r}")
        for c in range(len(cells))
        for r in range(runs)
    ]
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(
                pool.map(lambda t: _execute_run(samples, schema, t[2], t[3], t[0], t[1]), tasks)
            )
    else:
        outcomes = [_execute_run(samples, schema, cfg, d, c, r) for c, r, cfg, d in tasks]

    rows = []
    for c, cell in enumerate(cells):
        ok = [o for o in outcomes if o.cell == c and o.error is None]
        row: Dict[str, Any] = dict(cell)
        if ok:
            recall = np.mean([o.recall for o in ok], axis=0)
            precision = np.mean([o.precision for o in ok], axis=0)
            for i, name in enumerate(CLASS_NAMES):
                row[f"{name} R mean%"] = float(recall[i])
                row[f"{name} P mean%"] = float(precision[i])
            row["macro R mean%"] = float(np.mean(recall))
            row["macro P mean%"] = float(np.mean(precision))
        row["runs_ok"] = len(ok)
        row["runs_failed"] = runs - len(ok)
        rows.append(row)

    write_csv(out_dir / SWEEP_SUMMARY_FILE, summary_columns(list(grid)), rows)
    return rows


def sweep_outputs(out_dir: Union[str, Path]) -> List[str]:
    """Summary plus every per-run result file, relative to ``out_dir``."""
    out_dir = Path(out_dir)
    runs = sorted(
        p.relative_to(out_dir).as_posix()
        for name in (METRICS_FILE, ERROR_FILE)
        for p in out_dir.glob(f"cell_*/run_*/{name}")
    )
    return [SWEEP_SUMMARY_FILE] + runs
