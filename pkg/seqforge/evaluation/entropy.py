"""Adjacency-entropy diagnostics: how predictable a player's cluster moves are."""

from dataclasses import dataclass, field
from typing import List, Union

import numpy as np
from scipy.stats import entropy

from seqforge.classifier.mapping import TransitionMatrix, build_adjacency


def adjacency_entropy(matrix: Union[TransitionMatrix, np.ndarray]) -> float:
    """Shannon entropy in bits over all K*K cells.

    Parameters
    ----------
    matrix : Union[TransitionMatrix, np.ndarray]
        Transition matrix, or an array of counts / probabilities.

    Returns
    -------
    float
        ``-sum p log2 p`` over non-zero cells; 0 for an all-zero matrix.

    Examples
    --------
    >>> round(adjacency_entropy(np.array([[0, 1], [1, 1]])), 3)
    1.585
    """
    cells = matrix.counts if isinstance(matrix, TransitionMatrix) else np.asarray(matrix)
    cells = cells.astype(np.float64).ravel()
    if cells.sum() <= 0:
        return 0.0
    return float(entropy(cells[cells > 0], base=2))


def player_entropies(cluster_ids: np.ndarray, real_mask: np.ndarray, k: int) -> np.ndarray:
    """Entropy of every player's transition matrix, (N,) bits."""
    return np.array(
        [
            adjacency_entropy(build_adjacency(cluster_ids[i], k, real_mask[i]))
            for i in range(cluster_ids.shape[0])
        ]
    )


@dataclass
class EntropyTrace:
    """Adjacency entropy per collaborative epoch.

    Attributes
    ----------
    epochs : List[int]
        Collaborative epoch numbers (1-based).
    per_player : List[np.ndarray]
        (N,) entropies for each recorded epoch.
    """

    epochs: List[int] = field(default_factory=list)
    per_player: List[np.ndarray] = field(default_factory=list)

    def record(self, epoch: int, entropies: np.ndarray) -> None:
        self.epochs.append(int(epoch))
        self.per_player.append(np.asarray(entropies, dtype=np.float64))

    @property
    def mean_bits(self) -> List[float]:
        """Dataset mean per epoch."""
        return [float(np.mean(e)) if e.size else 0.0 for e in self.per_player]

    def dropped(self) -> bool:
        """True when the last epoch's mean is strictly below the first's."""
        means = self.mean_bits
        return len(means) >= 2 and means[-1] < means[0]
