"""Numerics package.

Reverse-mode differentiation over numpy arrays, the finite-difference
gradient oracle, the deterministic top-k eigensolver behind the cluster
indicator, k-means, and the Adam optimizer.
"""

from seqforge.numerics.gradcheck import grad_check
from seqforge.numerics.kmeans import ClusterModel, kmeans
from seqforge.numerics.linalg import ClusterIndicator, top_k_eigenvectors
from seqforge.numerics.module import Dense, Module, xavier_uniform
from seqforge.numerics.optim import Adam
from seqforge.numerics.tensor import Tensor, as_tensor, concat, stack

__all__ = [
    "Tensor",
    "as_tensor",
    "concat",
    "stack",
    "grad_check",
    "ClusterIndicator",
    "top_k_eigenvectors",
    "ClusterModel",
    "kmeans",
    "Adam",
    "Module",
    "Dense",
    "xavier_uniform",
]
