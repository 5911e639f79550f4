"""Classifier input mappings from per-player cluster structure.

These run outside every gradient graph: cluster ids are discrete and the
mapped arrays are plain numpy inputs to the classifier.

- ``tm``: K x K transition (adjacency) matrix of consecutive sequences.
- ``s``: the ordered (S, M) latent rows themselves.
- ``f``: the length-K histogram of cluster ids.
"""

from dataclasses import dataclass
from typing import Optional

import numpy as np


@dataclass
class TransitionMatrix:
    """Cluster-to-cluster move counts for one player.

    Attributes
    ----------
    counts : np.ndarray
        (K x K) integer counts; ``counts[i, j]`` is the number of times
        sequence t was in cluster i and sequence t+1 in cluster j.
    """

    counts: np.ndarray

    @property
    def k(self) -> int:
        return int(self.counts.shape[0])

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    @property
    def normalized(self) -> np.ndarray:
        """Counts divided by their total (all zeros when there is no transition)."""
        if self.total == 0:
            return np.zeros(self.counts.shape)
        return self.counts / float(self.total)


def _real_mask(cluster_ids: np.ndarray, real_mask: Optional[np.ndarray]) -> np.ndarray:
    if real_mask is None:
        return np.ones(cluster_ids.shape, dtype=bool)
    real_mask = np.asarray(real_mask, dtype=bool)
    if real_mask.shape != cluster_ids.shape:
        raise ValueError(
            f"real_mask shape {real_mask.shape} does not match ids shape {cluster_ids.shape}"
        )
    return real_mask


def _check_ids(cluster_ids: np.ndarray, k: int, real: np.ndarray) -> None:
    if k < 1:
        raise ValueError(f"K must be >= 1, got {k}")
    ids = cluster_ids[real]
    if ids.size and (ids.min() < 0 or ids.max() >= k):
        raise ValueError(f"cluster ids must be in [0, {k}), got range [{ids.min()}, {ids.max()}]")


def build_adjacency(
    cluster_ids: np.ndarray, k: int, real_mask: Optional[np.ndarray] = None
) -> TransitionMatrix:
    """Count transitions between consecutive real sequences.

    Parameters
    ----------
    cluster_ids : np.ndarray
        Length-S cluster id per sequence.
    k : int
        Number of clusters.
    real_mask : Optional[np.ndarray]
        Length-S flags; pairs touching a padded sequence are skipped.

    Returns
    -------
    TransitionMatrix
        Counts with globally normalized view.

    Raises
    ------
    ValueError
        If a real sequence's id is outside [0, k).

    Examples
    --------
    >>> build_adjacency(np.array([0, 1, 1, 0]), 2).counts
    array([[0, 1],
           [1, 1]])
    """
    cluster_ids = np.asarray(cluster_ids, dtype=np.int64)
    real = _real_mask(cluster_ids, real_mask)
    _check_ids(cluster_ids, k, real)
    counts = np.zeros((k, k), dtype=np.int64)
    both = real[:-1] & real[1:]
    np.add.at(counts, (cluster_ids[:-1][both], cluster_ids[1:][both]), 1)
    return TransitionMatrix(counts=counts)


def map_sequential(latents: np.ndarray, real_mask: Optional[np.ndarray] = None) -> np.ndarray:
    """Latent rows in original sequence order, padded rows zeroed."""
    latents = np.array(latents, dtype=np.float64, copy=True)
    if real_mask is not None:
        latents[~np.asarray(real_mask, dtype=bool)] = 0.0
    return latents


def map_frequency(
    cluster_ids: np.ndarray, k: int, real_mask: Optional[np.ndarray] = None
) -> np.ndarray:
    """Normalized histogram of cluster ids over real sequences.

    Raises
    ------
    ValueError
        If every sequence is padded, or an id is out of range.

    Examples
    --------
    >>> map_frequency(np.array([0, 0, 1]), 3)
    array([0.66666667, 0.33333333, 0.        ])
    """
    cluster_ids = np.asarray(cluster_ids, dtype=np.int64)
    real = _real_mask(cluster_ids, real_mask)
    if not np.any(real):
        raise ValueError("cannot build a frequency map: every sequence is padded")
    _check_ids(cluster_ids, k, real)
    counts = np.bincount(cluster_ids[real], minlength=k).astype(np.float64)
    return counts / counts.sum()


def map_inputs(
    variant: str,
    latents: np.ndarray,
    cluster_ids: np.ndarray,
    real_mask: np.ndarray,
    k: int,
) -> np.ndarray:
    """Batch classifier input for ``variant``.

    Parameters
    ----------
    variant : str
        "tm", "s" or "f".
    latents : np.ndarray
        (N, S, M) latent rows per player.
    cluster_ids : np.ndarray
        (N, S) cluster id per sequence.
    real_mask : np.ndarray
        (N, S) real-sequence flags.
    k : int
        Number of clusters.

    Returns
    -------
    np.ndarray
        (N, 1, K, K) for "tm", (N, S, M) for "s", (N, K) for "f". A player
        with no real sequence maps to zeros under "f".
    """
    n_players = cluster_ids.shape[0]
    if variant == "tm":
        return np.stack(
            [build_adjacency(cluster_ids[i], k, real_mask[i]).normalized for i in range(n_players)]
        ).reshape(n_players, 1, k, k)
    if variant == "s":
        return np.stack([map_sequential(latents[i], real_mask[i]) for i in range(n_players)])
    if variant == "f":
        return np.stack(
            [
                map_frequency(cluster_ids[i], k, real_mask[i]) if np.any(real_mask[i]) else np.zeros(k)
                for i in range(n_players)
            ]
        )
    raise ValueError(f"unknown classifier variant {variant!r}")
