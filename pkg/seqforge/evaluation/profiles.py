"""Cluster profiles on raw feature scales and per-class transition summaries."""

from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from seqforge.classifier.mapping import build_adjacency
from seqforge.core.constants import CLASS_NAMES


@dataclass
class ClusterProfile:
    """Summary of the sequences assigned to one cluster.

    Attributes
    ----------
    cluster_id : int
        Cluster index.
    count : int
        Number of real sequences in the cluster.
    mean_length : Optional[float]
        Mean number of games per sequence.
    mean, median, q1, q3 : Optional[np.ndarray]
        Per-feature statistics over every game of the cluster's sequences;
        None for an empty cluster.
    """

    cluster_id: int
    count: int
    mean_length: Optional[float] = None
    mean: Optional[np.ndarray] = None
    median: Optional[np.ndarray] = None
    q1: Optional[np.ndarray] = None
    q3: Optional[np.ndarray] = None

    def to_rows(self, feature_names: Sequence[str]) -> List[Dict[str, Any]]:
        rows = []
        for j, name in enumerate(feature_names):
            rows.append(
                {
                    "cluster_id": self.cluster_id,
                    "count": self.count,
                    "mean_length": self.mean_length,
                    "feature": name,
                    "mean": None if self.mean is None else float(self.mean[j]),
                    "median": None if self.median is None else float(self.median[j]),
                    "q1": None if self.q1 is None else float(self.q1[j]),
                    "q3": None if self.q3 is None else float(self.q3[j]),
                }
            )
        return rows


def cluster_profiles(
    raw: np.ndarray,
    valid_lengths: np.ndarray,
    assignments: np.ndarray,
    k: int,
) -> List[ClusterProfile]:
    """Profile every cluster from raw (un-normalized) games.

    Parameters
    ----------
    raw : np.ndarray
        (N, S, L, F) padded raw features.
    valid_lengths : np.ndarray
        (N, S) real rows per sequence; 0 marks padding sequences.
    assignments : np.ndarray
        (N, S) cluster id per sequence (ignored for padding sequences).
    k : int
        Number of clusters.

    Returns
    -------
    List[ClusterProfile]
        K profiles sorted by population, largest first (ties by cluster id).
        Empty clusters are present with count 0 and no statistics.
    """
    real = valid_lengths > 0
    profiles = []
    for cluster in range(k):
        members = np.argwhere(real & (assignments == cluster))
        if members.size == 0:
            profiles.append(ClusterProfile(cluster_id=cluster, count=0))
            continue
        games = np.concatenate([raw[i, j, : valid_lengths[i, j]] for i, j in members], axis=0)
        lengths = valid_lengths[real & (assignments == cluster)]
        q1, median, q3 = np.percentile(games, [25.0, 50.0, 75.0], axis=0)
        profiles.append(
            ClusterProfile(
                cluster_id=cluster,
                count=int(members.shape[0]),
                mean_length=float(lengths.mean()),
                mean=games.mean(axis=0),
                median=median,
                q1=q1,
                q3=q3,
            )
        )
    return sorted(profiles, key=lambda p: (-p.count, p.cluster_id))


def class_transition_means(
    cluster_ids: np.ndarray,
    real_mask: np.ndarray,
    labels: np.ndarray,
    k: int,
    n_classes: int = len(CLASS_NAMES),
) -> np.ndarray:
    """Mean normalized transition matrix per class.

    Players without any transition are left out of their class mean.

    Returns
    -------
    np.ndarray
        (C, K, K); each class slice sums to 1 (or is all zeros when no
        player of that class has a transition).
    """
    out = np.zeros((n_classes, k, k))
    for c in range(n_classes):
        mats = [
            build_adjacency(cluster_ids[i], k, real_mask[i])
            for i in np.flatnonzero(labels == c)
        ]
        mats = [m.normalized for m in mats if m.total > 0]
        if mats:
            out[c] = np.mean(mats, axis=0)
    return out
