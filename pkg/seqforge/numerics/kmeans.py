"""Lloyd's k-means with k-means++ seeding.

Used once per collaborative epoch to turn latent representations into
the discrete cluster identifiers consumed by the SIGN matrix and by the
classifier input mappings.
"""

from dataclasses import dataclass, field
from typing import List, Tuple

import numpy as np
from scipy.spatial.distance import cdist

from seqforge.core.constants import KMEANS_MAX_ITER
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class ClusterModel:
    """Fitted k-means centroids.

    Attributes
    ----------
    centroids : np.ndarray
        (K x M) centroid matrix.
    k : int
        Number of clusters.
    seed : int
        Seed used for k-means++ initialization.
    inertia : float
        Sum of squared distances of points to their assigned centroid.
    n_iter : int
        Lloyd iterations run.
    inertia_history : List[float]
        Inertia after every assignment step.
    """

    centroids: np.ndarray
    k: int
    seed: int
    inertia: float = 0.0
    n_iter: int = 0
    inertia_history: List[float] = field(default_factory=list)

    def predict(self, points: np.ndarray) -> np.ndarray:
        """Assign each row of ``points`` to its nearest centroid (lowest index on ties)."""
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != self.centroids.shape[1]:
            raise ValueError(
                f"points must have shape (n, {self.centroids.shape[1]}), got {points.shape}"
            )
        return np.argmin(cdist(points, self.centroids, "sqeuclidean"), axis=1)


def kmeans(
    points: np.ndarray, k: int, seed: int, max_iter: int = KMEANS_MAX_ITER
) -> Tuple[np.ndarray, ClusterModel]:
    """Cluster rows of ``points`` into ``k`` groups.

    Parameters
    ----------
    points : np.ndarray
        (n x M) finite matrix.
    k : int
        Number of clusters, 1 <= k <= n.
    seed : int
        Seed for the k-means++ draws.
    max_iter : int
        Cap on Lloyd steps.

    Returns
    -------
    Tuple[np.ndarray, ClusterModel]
        Length-n int assignments in [0, k) and the fitted model.

    Raises
    ------
    ValueError
        If points is not a finite 2-D matrix or k is out of range.

    Notes
    -----
    Iterates until no assignment changes or ``max_iter`` steps; when the
    cap is hit, points are reassigned once to the final centroids.
    A centroid that loses all its points is moved onto the point farthest
    from its own centroid (ties by lowest index; each repair in one step
    takes a different point).

    Examples
    --------
    >>> pts = np.array([[0.0], [0.0], [5.0], [5.0]])
    >>> labels, model = kmeans(pts, 2, seed=0)
    >>> model.inertia
    0.0
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2:
        raise ValueError(f"points must be a 2-D matrix, got shape {points.shape}")
    n = points.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    if max_iter < 1:
        raise ValueError(f"max_iter must be >= 1, got {max_iter}")
    if not np.all(np.isfinite(points)):
        raise ValueError("points must be finite")

    rng = np.random.default_rng(seed)
    centroids = _plusplus_init(points, k, rng)

    history: List[float] = []
    previous = None
    assignments = np.zeros(n, dtype=np.int64)
    converged = False
    n_iter = 0
    for n_iter in range(1, max_iter + 1):
        distances = cdist(points, centroids, "sqeuclidean")
        assignments = np.argmin(distances, axis=1)
        history.append(float(distances[np.arange(n), assignments].sum()))
        if previous is not None and np.array_equal(assignments, previous):
            converged = True
            break
        previous = assignments
        centroids = _update_centroids(points, assignments, distances, k)
    if not converged:
        # labels must match the centroids of the last update
        distances = cdist(points, centroids, "sqeuclidean")
        assignments = np.argmin(distances, axis=1)
        history.append(float(distances[np.arange(n), assignments].sum()))
        logger.warning(f"kmeans k={k} hit max_iter={max_iter} before converging")

    model = ClusterModel(
        centroids=centroids,
        k=k,
        seed=seed,
        inertia=history[-1],
        n_iter=n_iter,
        inertia_history=history,
    )
    logger.debug(f"kmeans k={k} converged in {n_iter} iterations, inertia {model.inertia:.6g}")
    return assignments.astype(np.int64), model


def _plusplus_init(points: np.ndarray, k: int, rng: np.random.Generator) -> np.ndarray:
    n = points.shape[0]
    chosen = [int(rng.integers(0, n))]
    closest = cdist(points, points[chosen], "sqeuclidean")[:, 0]
    for _ in range(1, k):
        total = closest.sum()
        if total > 0:
            idx = int(rng.choice(n, p=closest / total))
        else:
            # every point coincides with a centroid already
            idx = next(i for i in range(n) if i not in chosen)
        chosen.append(idx)
        closest = np.minimum(closest, cdist(points, points[[idx]], "sqeuclidean")[:, 0])
    return points[chosen].copy()


def _update_centroids(
    points: np.ndarray, assignments: np.ndarray, distances: np.ndarray, k: int
) -> np.ndarray:
    centroids = np.empty((k, points.shape[1]))
    own_distance = distances[np.arange(points.shape[0]), assignments]
    taken = set()
    for cluster in range(k):
        members = assignments == cluster
        if np.any(members):
            centroids[cluster] = points[members].mean(axis=0)
            continue
        order = np.lexsort((np.arange(points.shape[0]), -own_distance))
        far = next(int(i) for i in order if int(i) not in taken)
        taken.add(far)
        centroids[cluster] = points[far]
        logger.warning(f"kmeans cluster {cluster} emptied; re-seeded at point {far}")
    return centroids
