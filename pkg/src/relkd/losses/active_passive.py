"""
Active and passive robust losses: NCE, MAE, AGCE, AUL, AEL.

Active losses (NCE) push up the labelled class; passive losses (MAE and the
asymmetric family) only penalise the labelled probability falling short.
They are meant to be paired with `combo`.
"""

import numpy as np

from relkd.exceptions import ConfigurationError
from relkd.losses.base import BaseLoss, check_batch, label_prob_loss
from relkd.models import LossOut, RobustParams
from relkd.numerics.linalg import log_softmax_rows

AP_KINDS = ("MAE", "NCE", "AGCE", "AUL", "AEL")


def nce(logits: np.ndarray, labels: np.ndarray) -> LossOut:
    """Normalized cross entropy: -log p_y / sum_c(-log p_c)."""
    z, y = check_batch(logits, labels)
    B, C = z.shape
    logp = log_softmax_rows(z)
    p = np.exp(logp)
    neg = -logp
    total = neg.sum(axis=1)
    value = neg[np.arange(B), y] / total
    grad = p.copy()
    grad[np.arange(B), y] -= 1.0
    grad -= value[:, None] * (C * p - 1.0)
    grad /= total[:, None]
    return LossOut(value=float(value.mean()), grad_logits=grad / B)


def mae(logits: np.ndarray, labels: np.ndarray) -> LossOut:
    """sum_c |p_c - onehot_c| = 2 (1 - p_y)."""
    return label_prob_loss(
        logits, labels,
        lambda p_y: 2.0 * (1.0 - p_y),
        lambda p_y: np.full_like(p_y, -2.0),
    )


def agce(logits: np.ndarray, labels: np.ndarray, a: float = 0.6, q: float = 0.6) -> LossOut:
    """Asymmetric GCE ((a + 1)^q - (a + p_y)^q) / q."""
    if a <= 0 or q <= 0:
        raise ConfigurationError(f"agce needs a > 0 and q > 0, got a={a}, q={q}", key="loss.agce_a")
    return label_prob_loss(
        logits, labels,
        lambda p_y: ((a + 1.0) ** q - (a + p_y) ** q) / q,
        lambda p_y: -((a + p_y) ** (q - 1.0)),
    )


def aul(logits: np.ndarray, labels: np.ndarray, a: float = 3.0, q: float = 0.1) -> LossOut:
    """Asymmetric unhinged loss ((a - p_y)^q - (a - 1)^q) / q."""
    if a <= 1 or q <= 0:
        raise ConfigurationError(f"aul needs a > 1 and q > 0, got a={a}, q={q}", key="loss.aul_a")
    return label_prob_loss(
        logits, labels,
        lambda p_y: ((a - p_y) ** q - (a - 1.0) ** q) / q,
        lambda p_y: -((a - p_y) ** (q - 1.0)),
    )


def ael(logits: np.ndarray, labels: np.ndarray, a: float = 2.5) -> LossOut:
    """Asymmetric exponential loss exp(-p_y / a)."""
    if a <= 0:
        raise ConfigurationError(f"ael needs a > 0, got a={a}", key="loss.ael_a")
    return label_prob_loss(
        logits, labels,
        lambda p_y: np.exp(-p_y / a),
        lambda p_y: -np.exp(-p_y / a) / a,
    )


def active_passive(kind: str, logits: np.ndarray, labels: np.ndarray, params: RobustParams | None = None) -> LossOut:
    """
    Dispatch one active/passive loss by kind.

    Raises:
        ConfigurationError: Unknown kind or invalid parameters
    """
    params = params or RobustParams()
    key = kind.upper()
    if key == "MAE":
        return mae(logits, labels)
    if key == "NCE":
        return nce(logits, labels)
    if key == "AGCE":
        return agce(logits, labels, params.agce_a, params.agce_q)
    if key == "AUL":
        return aul(logits, labels, params.aul_a, params.aul_q)
    if key == "AEL":
        return ael(logits, labels, params.ael_a)
    raise ConfigurationError(f"Unknown active/passive loss '{kind}', expected one of {AP_KINDS}", key="loss.name")


class ActivePassiveLoss(BaseLoss):
    """A single member of the active/passive family, selected by kind."""

    def __init__(self, kind: str, params: RobustParams | None = None) -> None:
        super().__init__(params)
        if kind.upper() not in AP_KINDS:
            raise ConfigurationError(f"Unknown active/passive loss '{kind}'", key="loss.name")
        self.kind = kind.upper()

    @property
    def name(self) -> str:
        return self.kind.lower()

    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> LossOut:
        return active_passive(self.kind, logits, labels, self.params)

