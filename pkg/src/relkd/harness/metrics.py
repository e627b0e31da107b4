"""
Evaluation metrics: exact-match accuracy and representation-collapse indicators.
"""

import numpy as np

from relkd.exceptions import DimensionError
from relkd.numerics.linalg import l2_normalize_rows


def accuracy(preds: np.ndarray, labels: np.ndarray) -> float:
    """
    Correct predictions over total predictions.

    Raises:
        DimensionError: If lengths differ
        ValueError: If there are no predictions
    """
    preds = np.asarray(preds).ravel()
    labels = np.asarray(labels).ravel()
    if preds.shape != labels.shape:
        raise DimensionError(f"{preds.size} predictions but {labels.size} labels")
    if preds.size == 0:
        raise ValueError("accuracy of an empty prediction set")
    return float(np.count_nonzero(preds == labels)) / preds.size


def confusion_matrix(preds: np.ndarray, labels: np.ndarray, num_classes: int) -> np.ndarray:
    """Counts with rows = true class, columns = predicted class."""
    cm = np.zeros((num_classes, num_classes), dtype=np.int64)
    np.add.at(cm, (np.asarray(labels, dtype=np.int64), np.asarray(preds, dtype=np.int64)), 1)
    return cm


def representation_metrics(embeddings: np.ndarray) -> dict[str, float]:
    """
    Collapse indicators for a batch of representations.

    Returns:
        std_mean: mean per-coordinate std of l2-normalized rows (near 0 means collapse)
        std_std: spread of those per-coordinate stds
        norm_mean: mean raw L2 norm
        effective_rank: exp(entropy) of the normalized singular values
    """
    z = np.asarray(embeddings, dtype=np.float64)
    stds = l2_normalize_rows(z).std(axis=0)
    singular = np.linalg.svd(z - z.mean(axis=0), compute_uv=False)
    total = singular.sum()
    if total > 0:
        s = singular / total
        s = s[s > 0]
        effective_rank = float(np.exp(-(s * np.log(s)).sum()))
    else:
        effective_rank = 0.0
    return {
        "std_mean": float(stds.mean()),
        "std_std": float(stds.std()),
        "norm_mean": float(np.linalg.norm(z, axis=1).mean()),
        "effective_rank": effective_rank,
    }


def collapse_threshold(dim: int, factor: float = 0.1) -> float:
    """factor / sqrt(D): floor for std_mean below which embeddings count as collapsed."""
    return factor / np.sqrt(dim)
