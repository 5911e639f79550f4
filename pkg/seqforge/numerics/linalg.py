"""Truncated symmetric eigendecomposition for the cluster-indicator update.

The trace form of the k-means objective is minimized over an orthonormal
indicator F by the leading eigenvectors of the sequence Gram matrix;
``top_k_eigenvectors`` computes that basis deterministically.
"""

from dataclasses import dataclass

import numpy as np
from scipy.linalg import eigh

from seqforge.core.constants import ORTHONORMAL_TOL, SYMMETRY_TOL
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class ClusterIndicator:
    """Orthonormal relaxation of cluster membership.

    Attributes
    ----------
    matrix : np.ndarray
        (n_sequences x K) matrix with orthonormal columns.
    stale_counter : int
        Interpreter iterations since the last refresh.
    """

    matrix: np.ndarray
    stale_counter: int = 0

    @property
    def n_sequences(self) -> int:
        return int(self.matrix.shape[0])

    @property
    def k(self) -> int:
        return int(self.matrix.shape[1])

    def orthonormality_error(self) -> float:
        """max |F^T F - I|."""
        gram = self.matrix.T @ self.matrix
        return float(np.max(np.abs(gram - np.eye(self.k))))

    def is_orthonormal(self, tol: float = ORTHONORMAL_TOL) -> bool:
        return self.orthonormality_error() <= tol

    def tick(self) -> None:
        """Record one interpreter iteration without a refresh."""
        self.stale_counter += 1

    def is_due(self, period: int) -> bool:
        """True once ``period`` iterations have passed since the last refresh."""
        return self.stale_counter >= period


def top_k_eigenvectors(gram: np.ndarray, k: int) -> ClusterIndicator:
    """Return the k leading eigenvectors of a symmetric PSD matrix.

    Parameters
    ----------
    gram : np.ndarray
        Symmetric (n x n) matrix.
    k : int
        Number of eigenvectors, 1 <= k <= n.

    Returns
    -------
    ClusterIndicator
        Columns ordered by descending eigenvalue, stale_counter 0.

    Raises
    ------
    ValueError
        If gram is not square and symmetric within tolerance, or k is out
        of range.

    Notes
    -----
    Eigenvalues equal within 1e-10 (relative to the spectral scale) are
    ties. A tied group is re-expressed in a basis built from the
    coordinate axes in index order (the identity yields the standard
    basis), so the result does not depend on the solver. Each column's sign is fixed so its first entry with magnitude above
    1e-12 is positive.

    Examples
    --------
    >>> top_k_eigenvectors(np.diag([5.0, 3.0, 1.0]), 2).matrix
    array([[1., 0.],
           [0., 1.],
           [0., 0.]])
    """
    gram = np.asarray(gram, dtype=np.float64)
    if gram.ndim != 2 or gram.shape[0] != gram.shape[1]:
        raise ValueError(f"gram must be square, got shape {gram.shape}")
    n = gram.shape[0]
    if not 1 <= k <= n:
        raise ValueError(f"k must be in [1, {n}], got {k}")
    scale = max(1.0, float(np.max(np.abs(gram))) if gram.size else 1.0)
    asymmetry = float(np.max(np.abs(gram - gram.T))) if gram.size else 0.0
    if asymmetry > SYMMETRY_TOL * scale:
        raise ValueError(f"gram must be symmetric (max asymmetry {asymmetry:.3e})")

    eigenvalues, eigenvectors = eigh((gram + gram.T) / 2.0)
    if eigenvalues[0] < -SYMMETRY_TOL * scale:
        logger.warning(f"gram is not PSD (smallest eigenvalue {eigenvalues[0]:.3e})")

    rounded = np.round(eigenvalues / scale, 10)
    order = np.lexsort((np.arange(n), -rounded))
    values = rounded[order]
    vectors = eigenvectors[:, order]

    # tied eigenvalues span a subspace; pick its basis by coordinate index
    start = 0
    while start < n:
        stop = start + 1
        while stop < n and values[stop] == values[start]:
            stop += 1
        if stop - start > 1 and start < k:
            vectors[:, start:stop] = _canonical_basis(vectors[:, start:stop])
        start = stop
    basis = vectors[:, :k].copy()

    for col in range(k):
        nonzero = np.flatnonzero(np.abs(basis[:, col]) > 1e-12)
        if nonzero.size and basis[nonzero[0], col] < 0:
            basis[:, col] = -basis[:, col]

    return ClusterIndicator(matrix=basis, stale_counter=0)


def _canonical_basis(vectors: np.ndarray) -> np.ndarray:
    """Orthonormal basis of span(vectors) built from the projected coordinate axes.

    Gram-Schmidt runs over the columns of the subspace projector in index
    order, so the result depends only on the subspace, not on the basis
    the eigensolver happened to return.
    """
    projector = vectors @ vectors.T
    dim = vectors.shape[1]
    chosen = []
    for j in range(projector.shape[0]):
        candidate = projector[:, j].copy()
        for _ in range(2):
            for q in chosen:
                candidate -= (q @ candidate) * q
        norm = np.linalg.norm(candidate)
        # some remaining axis always has residual norm >= 1/sqrt(n)
        if norm > 1e-3:
            chosen.append(candidate / norm)
            if len(chosen) == dim:
                break
    return np.stack(chosen, axis=1)
