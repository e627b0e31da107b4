"""
Cross entropy and its two classic robust relatives, GCE and SCE.
"""

import numpy as np

from relkd.exceptions import ConfigurationError
from relkd.losses.base import P_MIN, BaseLoss, check_batch, label_prob_loss, one_hot
from relkd.models import LossOut
from relkd.numerics.linalg import log_softmax_rows


def ce(logits: np.ndarray, labels: np.ndarray) -> LossOut:
    """Mean negative log-softmax of the labelled class; grad = (p - onehot) / B."""
    z, y = check_batch(logits, labels)
    B, C = z.shape
    logp = log_softmax_rows(z)
    value = -logp[np.arange(B), y].mean()
    grad = (np.exp(logp) - one_hot(y, C)) / B
    return LossOut(value=float(value), grad_logits=grad)


def gce(logits: np.ndarray, labels: np.ndarray, q: float = 0.7) -> LossOut:
    """Generalized cross entropy (1 - p_y^q) / q."""
    if not 0.0 < q <= 1.0:
        raise ConfigurationError(f"gce q must be in (0, 1], got {q}", key="loss.gce_q")

    def phi(p_y):
        return (1.0 - np.maximum(p_y, P_MIN) ** q) / q

    def dphi(p_y):
        return -np.maximum(p_y, P_MIN) ** (q - 1.0)

    return label_prob_loss(logits, labels, phi, dphi)


def rce(logits: np.ndarray, labels: np.ndarray, A: float = -4.0) -> LossOut:
    """Reverse cross entropy with log 0 := A, i.e. -A (1 - p_y)."""
    return label_prob_loss(
        logits, labels,
        lambda p_y: -A * (1.0 - p_y),
        lambda p_y: np.full_like(p_y, A),
    )


def sce(logits: np.ndarray, labels: np.ndarray, a: float = 0.1, b: float = 1.0, A: float = -4.0) -> LossOut:
    """Symmetric cross entropy a * CE + b * RCE."""
    if a <= 0 or b <= 0:
        raise ConfigurationError(f"sce weights must be positive, got a={a}, b={b}", key="loss.sce_a")
    if A >= 0:
        raise ConfigurationError(f"sce clamp A must be negative, got {A}", key="loss.sce_A")
    forward = ce(logits, labels)
    reverse = rce(logits, labels, A)
    return LossOut(
        value=a * forward.value + b * reverse.value,
        grad_logits=a * forward.grad_logits + b * reverse.grad_logits,
    )


class CrossEntropyLoss(BaseLoss):
    """Plain cross entropy."""

    @property
    def name(self) -> str:
        return "ce"

    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> LossOut:
        return ce(logits, labels)


class GCELoss(BaseLoss):
    """
    Generalized cross entropy.

    Configurable parameters:
    - gce_q: exponent in (0, 1] (default: 0.7)
    """

    @property
    def name(self) -> str:
        return "gce"

    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> LossOut:
        return gce(logits, labels, self.params.gce_q)


class SCELoss(BaseLoss):
    """
    Symmetric cross entropy.

    Configurable parameters:
    - sce_a, sce_b: CE and RCE weights (default: 0.1, 1.0)
    - sce_A: value substituted for log 0 (default: -4)
    """

    @property
    def name(self) -> str:
        return "sce"

    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> LossOut:
        return sce(logits, labels, self.params.sce_a, self.params.sce_b, self.params.sce_A)

