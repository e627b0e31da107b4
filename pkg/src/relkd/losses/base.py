"""
Shared softmax plumbing and the base interface for classification losses.
"""

from abc import ABC, abstractmethod

import numpy as np

from relkd.exceptions import DimensionError, LabelError
from relkd.models import LossOut, RobustParams
from relkd.numerics.linalg import softmax_rows

# Floor applied to probabilities inside powers.
P_MIN = 1e-12


def check_batch(logits: np.ndarray, labels: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Validate a (B, C) logit batch against B integer labels."""
    z = np.asarray(logits, dtype=np.float64)
    y = np.asarray(labels, dtype=np.int64)
    if z.ndim != 2:
        raise DimensionError(f"logits must be 2-D, got shape {z.shape}")
    if y.shape != (z.shape[0],):
        raise DimensionError(f"expected {z.shape[0]} labels, got shape {y.shape}")
    if y.size and (y.min() < 0 or y.max() >= z.shape[1]):
        raise LabelError(f"labels must lie in [0, {z.shape[1]})")
    return z, y


def one_hot(labels: np.ndarray, C: int) -> np.ndarray:
    out = np.zeros((labels.shape[0], C))
    out[np.arange(labels.shape[0]), labels] = 1.0
    return out


def label_prob_loss(logits: np.ndarray, labels: np.ndarray, phi, dphi) -> LossOut:
    """
    Batch mean of phi(p_y) with its exact logit gradient.

    Uses d p_y / d z = p_y (e_y - p), so d phi / d z = phi'(p_y) p_y (e_y - p).
    """
    z, y = check_batch(logits, labels)
    B, C = z.shape
    p = softmax_rows(z)
    p_y = p[np.arange(B), y]
    values = phi(p_y)
    grad = (dphi(p_y) * p_y)[:, None] * (one_hot(y, C) - p)
    return LossOut(value=float(values.mean()), grad_logits=grad / B)


class BaseLoss(ABC):
    """Abstract base class for configured classification losses."""

    def __init__(self, params: RobustParams | None = None) -> None:
        """
        Initialize loss with its hyperparameters.

        Args:
            params: Robust-loss hyperparameters (defaults when omitted)
        """
        self.params = params or RobustParams()

    @property
    @abstractmethod
    def name(self) -> str:
        """Loss identifier (e.g., 'ce', 'nce_agce')."""
        ...

    @abstractmethod
    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> LossOut:
        """
        Evaluate the loss on a batch.

        Args:
            logits: (B, C) head outputs
            labels: B class ids in [0, C)

        Returns:
            LossOut with the batch-mean value and gradient w.r.t. logits
        """
        ...

    def __repr__(self) -> str:
        return f"{type(self).__name__}(name={self.name!r})"
