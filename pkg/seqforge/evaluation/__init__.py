"""Evaluation package: metrics, entropy, profiles, recovery and export."""

from seqforge.evaluation.entropy import EntropyTrace, adjacency_entropy, player_entropies
from seqforge.evaluation.export import export_embeddings, read_embeddings
from seqforge.evaluation.metrics import MetricsReport, precision_recall
from seqforge.evaluation.profiles import ClusterProfile, class_transition_means, cluster_profiles
from seqforge.evaluation.recovery import cluster_recovery, nearest_mean_assignments

__all__ = [
    "MetricsReport",
    "precision_recall",
    "EntropyTrace",
    "adjacency_entropy",
    "player_entropies",
    "ClusterProfile",
    "cluster_profiles",
    "class_transition_means",
    "cluster_recovery",
    "nearest_mean_assignments",
    "export_embeddings",
    "read_embeddings",
]
