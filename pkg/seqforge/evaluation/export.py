"""Latent embedding export for external plotting."""

from pathlib import Path
from typing import Sequence, Tuple, Union

import numpy as np

from seqforge.utils.results import read_csv, write_csv


def export_embeddings(
    latents: np.ndarray,
    assignments: np.ndarray,
    path: Union[str, Path],
    player_ids: Sequence[str],
    seq_index: Sequence[int],
) -> Path:
    """Write ``player_id,seq_index,cluster_id,h_1..h_M``.

    Parameters
    ----------
    latents : np.ndarray
        (n, M) latent rows.
    assignments : np.ndarray
        (n,) cluster ids.
    path : Union[str, Path]
        Destination CSV.
    player_ids, seq_index : Sequence
        Provenance of each row.

    Returns
    -------
    Path
        Written file. Floats are written with repr, so parsing them back
        reproduces the latents exactly.
    """
    latents = np.asarray(latents, dtype=np.float64)
    n, m = latents.shape
    if not (len(assignments) == len(player_ids) == len(seq_index) == n):
        raise ValueError("latents, assignments and provenance must have the same length")
    columns = [f"h_{j + 1}" for j in range(m)]
    rows = []
    for i in range(n):
        row = {"player_id": player_ids[i], "seq_index": int(seq_index[i]), "cluster_id": int(assignments[i])}
        row.update({col: float(latents[i, j]) for j, col in enumerate(columns)})
        rows.append(row)
    return write_csv(path, ["player_id", "seq_index", "cluster_id"] + columns, rows)


def read_embeddings(path: Union[str, Path]) -> Tuple[np.ndarray, np.ndarray]:
    """Parse an embeddings CSV back into (latents, cluster ids)."""
    rows = read_csv(path)
    if not rows:
        return np.zeros((0, 0)), np.zeros(0, dtype=np.int64)
    columns = [c for c in rows[0] if c.startswith("h_")]
    latents = np.array([[float(r[c]) for c in columns] for r in rows])
    ids = np.array([int(r["cluster_id"]) for r in rows], dtype=np.int64)
    return latents, ids
