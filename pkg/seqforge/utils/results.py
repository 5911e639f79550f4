"""Result files for training runs and sweeps.

All writers create parent directories, write to a temporary sibling and
rename it into place, and log the saved path. Floats are written with
``repr`` so a CSV parsed back with ``float`` reproduces them exactly.

Notes
-----
Run directories are append-only: the manifest is written once when the
command finishes and is never rewritten.
"""

import csv
import hashlib
import io
import json
import os
from dataclasses import asdict, dataclass, field
from datetime import datetime
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional, Sequence, Union

import numpy as np

from seqforge.core.constants import CLASS_NAMES
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)

PathLike = Union[str, Path]


# =============================================================================
# Low-level writers
# =============================================================================


def atomic_write_text(path: PathLike, text: str) -> Path:
    """Write ``text`` to ``path`` via a temporary file and rename.

    Parameters
    ----------
    path : PathLike
        Destination.
    text : str
        UTF-8 content.

    Returns
    -------
    Path
        The destination path.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(f".{path.name}.tmp")
    with open(tmp, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    os.replace(tmp, path)
    return path


def format_value(value: Any) -> str:
    """CSV cell text: floats via repr, None as empty."""
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return repr(float(value))
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return str(value)


def write_csv(path: PathLike, fieldnames: Sequence[str], rows: Iterable[Dict[str, Any]]) -> Path:
    """Write dict rows as CSV (header first) atomically."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(fieldnames)
    for row in rows:
        writer.writerow([format_value(row.get(name)) for name in fieldnames])
    path = atomic_write_text(path, buffer.getvalue())
    logger.info(f"Saved results to {path}")
    return path


def read_csv(path: PathLike) -> List[Dict[str, str]]:
    """Load a CSV file as a list of row dictionaries."""
    with open(Path(path), "r", newline="", encoding="utf-8") as f:
        return list(csv.DictReader(f))


def write_json(path: PathLike, payload: Dict[str, Any]) -> Path:
    """Write deterministic (sorted-key) JSON atomically."""
    return atomic_write_text(path, json.dumps(payload, indent=2, sort_keys=True, default=str) + "\n")


# =============================================================================
# Training outputs
# =============================================================================


def save_loss_history(records: Iterable[Any], path: PathLike) -> Path:
    """CSV ``epoch,phase,loss_name,value``; rows keep recording order.

    ``records`` are objects with those four attributes.
    """
    rows = [
        {"epoch": r.epoch, "phase": r.phase, "loss_name": r.loss_name, "value": r.value}
        for r in records
    ]
    return write_csv(path, ["epoch", "phase", "loss_name", "value"], rows)


def save_metrics(reports: Union[Any, Sequence[Any]], path: PathLike) -> Path:
    """CSV one row per (split, class, metric) of one or more ``MetricsReport`` objects."""
    if not isinstance(reports, (list, tuple)):
        reports = [reports]
    rows = [dict(row, split=r.split) for r in reports for row in r.to_rows()]
    return write_csv(path, ["split", "class", "metric", "value"], rows)


def save_confusion(report: Any, path: PathLike) -> Path:
    """Confusion matrix CSV; rows are true classes, columns predictions."""
    names = list(report.class_names)
    rows = [
        dict({"true": name}, **{pred: int(report.confusion[i, j]) for j, pred in enumerate(names)})
        for i, name in enumerate(names)
    ]
    return write_csv(path, ["true"] + names, rows)


def save_entropy_trace(trace: Any, path: PathLike) -> Path:
    """CSV ``epoch,mean_entropy_bits``."""
    rows = [
        {"epoch": epoch, "mean_entropy_bits": bits}
        for epoch, bits in zip(trace.epochs, trace.mean_bits)
    ]
    return write_csv(path, ["epoch", "mean_entropy_bits"], rows)


def save_player_entropy(trace: Any, player_ids: Sequence[str], path: PathLike) -> Path:
    """CSV ``epoch,player_id,entropy_bits``."""
    rows = [
        {"epoch": epoch, "player_id": pid, "entropy_bits": float(bits)}
        for epoch, values in zip(trace.epochs, trace.per_player)
        for pid, bits in zip(player_ids, values)
    ]
    return write_csv(path, ["epoch", "player_id", "entropy_bits"], rows)


def save_profiles(profiles: Sequence[Any], feature_names: Sequence[str], path: PathLike) -> Path:
    """Long-format cluster profile CSV, population-sorted."""
    rows = [row for p in profiles for row in p.to_rows(feature_names)]
    return write_csv(
        path,
        ["cluster_id", "count", "mean_length", "feature", "mean", "median", "q1", "q3"],
        rows,
    )


def save_class_transitions(means: np.ndarray, path: PathLike) -> Path:
    """Per-class mean transition matrices, one row per (class, from-cluster)."""
    k = means.shape[1]
    rows = []
    for c in range(means.shape[0]):
        for i in range(k):
            row: Dict[str, Any] = {"class": CLASS_NAMES[c], "from_cluster": i}
            row.update({f"to_{j}": float(means[c, i, j]) for j in range(k)})
            rows.append(row)
    return write_csv(path, ["class", "from_cluster"] + [f"to_{j}" for j in range(k)], rows)


# =============================================================================
# Run manifest
# =============================================================================


def content_hash(paths: Sequence[PathLike]) -> str:
    """Git-style blob hash of each input file, combined in the given order."""
    combined = hashlib.sha1()
    for p in paths:
        data = Path(p).read_bytes()
        blob = hashlib.sha1(f"blob {len(data)}\0".encode("utf-8") + data).hexdigest()
        combined.update(f"{Path(p).name}:{blob}\n".encode("utf-8"))
    return combined.hexdigest()


@dataclass
class RunManifest:
    """Provenance record of one command run.

    Attributes
    ----------
    command : str
        Subcommand name.
    config : Dict[str, Any]
        Fully resolved configuration.
    inputs : Dict[str, str]
        Named input paths.
    outputs : List[str]
        Artifacts written, relative to the run directory.
    seed : int
        Seed in effect (always explicit).
    input_hash : str
        ``content_hash`` of the input files.
    started_at, finished_at : str
        ISO timestamps.
    status : str
        "ok" or "failed".
    """

    command: str
    config: Dict[str, Any]
    inputs: Dict[str, str]
    seed: int
    input_hash: str = ""
    outputs: List[str] = field(default_factory=list)
    started_at: str = field(default_factory=lambda: datetime.now().isoformat())
    finished_at: str = ""
    status: str = "ok"

    def finish(self, status: str = "ok") -> "RunManifest":
        self.finished_at = datetime.now().isoformat()
        self.status = status
        return self


def save_manifest(manifest: RunManifest, path: PathLike, overwrite: bool = False) -> Path:
    """Write a manifest; refuses to overwrite an existing one unless asked.

    Run manifests are write-once. Manifests of files derived from a finished
    run (inspect, export) are rewritten with ``overwrite=True``.

    Raises
    ------
    FileExistsError
        If a manifest already exists at ``path`` and ``overwrite`` is False.
    """
    path = Path(path)
    if path.exists() and not overwrite:
        raise FileExistsError(f"Manifest already exists: {path}")
    write_json(path, asdict(manifest))
    logger.info(f"Saved manifest to {path}")
    return path


def load_manifest(path: PathLike) -> RunManifest:
    with open(Path(path), "r", encoding="utf-8") as f:
        return RunManifest(**json.load(f))


# =============================================================================
# Text report
# =============================================================================


def generate_summary_report(
    reports: Sequence[Any],
    entropy_means: Optional[Sequence[float]] = None,
    saturated: Optional[bool] = None,
    recovery: Optional[float] = None,
    title: str = "TRAINING RESULTS SUMMARY",
    output_path: Optional[PathLike] = None,
) -> str:
    """Plain-text summary of one or more ``MetricsReport`` objects.

    Parameters
    ----------
    reports : Sequence[MetricsReport]
        Reports to list (e.g. test and train splits).
    entropy_means : Optional[Sequence[float]]
        Mean adjacency entropy per collaborative epoch.
    saturated : Optional[bool]
        Whether the bridge loss had saturated.
    recovery : Optional[float]
        Adjusted Rand index against planted archetypes, when known.
    title : str
        Heading line.
    output_path : Optional[PathLike]
        If provided, save the report to this path.

    Returns
    -------
    str
        The report text.
    """
    lines = ["=" * 70, title, "=" * 70]
    for report in reports:
        lines.append("-" * 70)
        lines.append(f"Split: {report.split}   seed: {report.seed}   config: {report.config_hash}")
        lines.append(f"  {'class':<12}{'R %':>10}{'P %':>10}{'support':>10}")
        for i, name in enumerate(report.class_names):
            flag = "" if report.precision_defined[i] else "  (precision undefined)"
            lines.append(
                f"  {name:<12}{report.recall[i]:>10.2f}{report.precision[i]:>10.2f}"
                f"{int(report.support[i]):>10}{flag}"
            )
        lines.append(
            f"  {'macro':<12}{report.macro_recall:>10.2f}{report.macro_precision:>10.2f}"
        )
        lines.append("")
    if entropy_means:
        trace = ", ".join(f"{v:.3f}" for v in entropy_means)
        lines.append(f"Mean adjacency entropy per epoch (bits): {trace}")
    if saturated is not None:
        lines.append(f"Bridge loss saturated: {'yes' if saturated else 'no'}")
    if recovery is not None:
        lines.append(f"Archetype recovery (ARI): {recovery:.4f}")
    lines.append("=" * 70)

    report_text = "\n".join(lines) + "\n"
    if output_path:
        path = atomic_write_text(output_path, report_text)
        logger.info(f"Saved report to {path}")
    return report_text
