"""Agreement between learned clusters and planted archetypes."""

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.metrics import adjusted_rand_score


def cluster_recovery(assignments: np.ndarray, ground_truth: np.ndarray) -> float:
    """Adjusted Rand index between two partitions of the same sequences.

    Raises
    ------
    ValueError
        If the inputs differ in length.
    """
    assignments = np.asarray(assignments).ravel()
    ground_truth = np.asarray(ground_truth).ravel()
    if assignments.shape != ground_truth.shape:
        raise ValueError(
            f"assignments and ground truth differ in length: "
            f"{assignments.size} vs {ground_truth.size}"
        )
    return float(adjusted_rand_score(ground_truth, assignments))


def nearest_mean_assignments(
    raw: np.ndarray, valid_lengths: np.ndarray, archetype_means: np.ndarray
) -> np.ndarray:
    """Assign each real sequence to the archetype whose mean is closest to its feature mean.

    Parameters
    ----------
    raw : np.ndarray
        (N, S, L, F) raw padded features.
    valid_lengths : np.ndarray
        (N, S) real rows per sequence.
    archetype_means : np.ndarray
        (A, F) generating means.

    Returns
    -------
    np.ndarray
        Archetype index per real sequence, in row-major (player, position) order.
    """
    real = valid_lengths > 0
    sums = raw.sum(axis=2)[real]
    means = sums / valid_lengths[real][:, None]
    return np.argmin(cdist(means, np.asarray(archetype_means, dtype=np.float64)), axis=1)
