"""Per-class precision/recall reports."""

from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional

import numpy as np
from sklearn.metrics import confusion_matrix

from seqforge.core.constants import CLASS_NAMES
from seqforge.utils.logging import get_logger

logger = get_logger(__name__)


@dataclass
class MetricsReport:
    """Classification quality on one split.

    Attributes
    ----------
    precision, recall : np.ndarray
        Length-C percentages.
    precision_defined : np.ndarray
        False where a class was never predicted (its precision is reported as 0).
    confusion : np.ndarray
        (C x C) counts; rows are true classes, columns predictions.
    config_hash : str
        Hash of the training config that produced the predictions.
    seed : Optional[int]
        Training seed.
    split : str
        Which players were scored ("test", "train").
    """

    precision: np.ndarray
    recall: np.ndarray
    precision_defined: np.ndarray
    confusion: np.ndarray
    config_hash: str = ""
    seed: Optional[int] = None
    split: str = "test"
    class_names: List[str] = field(default_factory=lambda: list(CLASS_NAMES))

    @property
    def support(self) -> np.ndarray:
        return self.confusion.sum(axis=1)

    @property
    def macro_precision(self) -> float:
        return float(np.mean(self.precision))

    @property
    def macro_recall(self) -> float:
        return float(np.mean(self.recall))

    @property
    def accuracy(self) -> float:
        total = self.confusion.sum()
        return float(100.0 * np.trace(self.confusion) / total) if total else 0.0

    def to_rows(self) -> List[Dict[str, Any]]:
        """One row per (class, metric), then the macro averages."""
        rows: List[Dict[str, Any]] = []
        for i, name in enumerate(self.class_names):
            rows.append({"class": name, "metric": "recall", "value": float(self.recall[i])})
            rows.append({"class": name, "metric": "precision", "value": float(self.precision[i])})
            rows.append({"class": name, "metric": "support", "value": int(self.support[i])})
            rows.append(
                {"class": name, "metric": "precision_defined", "value": int(self.precision_defined[i])}
            )
        rows.append({"class": "macro", "metric": "recall", "value": self.macro_recall})
        rows.append({"class": "macro", "metric": "precision", "value": self.macro_precision})
        return rows


def precision_recall(
    predictions: np.ndarray,
    labels: np.ndarray,
    n_classes: int = len(CLASS_NAMES),
    config_hash: str = "",
    seed: Optional[int] = None,
    split: str = "test",
) -> MetricsReport:
    """Per-class precision and recall in percent.

    Parameters
    ----------
    predictions, labels : np.ndarray
        Equal-length class indices in [0, n_classes).

    Returns
    -------
    MetricsReport
        Recall_c = diag_c / row_sum_c; precision_c = diag_c / column_sum_c,
        0 (flagged undefined) for a class that is never predicted.

    Raises
    ------
    ValueError
        If the inputs are empty or of different lengths.

    Examples
    --------
    >>> r = precision_recall(np.zeros(3, int), np.array([0, 1, 2]))
    >>> r.recall.tolist(), round(float(r.precision[0]), 1)
    ([100.0, 0.0, 0.0], 33.3)
    """
    predictions = np.asarray(predictions, dtype=np.int64)
    labels = np.asarray(labels, dtype=np.int64)
    if predictions.size == 0:
        raise ValueError("cannot compute precision/recall of an empty prediction set")
    if predictions.shape != labels.shape:
        raise ValueError(
            f"predictions and labels differ in length: {predictions.size} vs {labels.size}"
        )
    confusion = confusion_matrix(labels, predictions, labels=list(range(n_classes)))
    diag = np.diag(confusion).astype(np.float64)
    row = confusion.sum(axis=1).astype(np.float64)
    col = confusion.sum(axis=0).astype(np.float64)
    recall = np.divide(100.0 * diag, row, out=np.zeros(n_classes), where=row > 0)
    precision = np.divide(100.0 * diag, col, out=np.zeros(n_classes), where=col > 0)
    defined = col > 0
    if not np.all(defined):
        missing = [CLASS_NAMES[i] if i < len(CLASS_NAMES) else str(i) for i in np.flatnonzero(~defined)]
        logger.warning(f"Precision undefined (never predicted), reported as 0: {missing}")
    return MetricsReport(
        precision=precision,
        recall=recall,
        precision_defined=defined,
        confusion=confusion.astype(np.int64),
        config_hash=config_hash,
        seed=seed,
        split=split,
        class_names=[CLASS_NAMES[i] if i < len(CLASS_NAMES) else str(i) for i in range(n_classes)],
    )
