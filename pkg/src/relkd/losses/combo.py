"""
Weighted active + passive combinations (NCE_AGCE, NCE_AUL, NCE_AEL, NCE_MAE).
"""

import numpy as np

from relkd.exceptions import ConfigurationError
from relkd.losses.active_passive import ActivePassiveLoss
from relkd.losses.base import BaseLoss
from relkd.models import LossFn, LossOut, RobustParams


def combo(active: LossFn, passive: LossFn, wa: float = 1.0, wp: float = 1.0) -> LossFn:
    """
    Linear combination wa * active + wp * passive.

    Returns:
        A loss callable whose value and gradient are the weighted sums
    """
    if wa < 0 or wp < 0:
        raise ConfigurationError(f"combo weights must be non-negative, got wa={wa}, wp={wp}", key="loss.active_weight")

    def combined(logits: np.ndarray, labels: np.ndarray) -> LossOut:
        a = active(logits, labels)
        p = passive(logits, labels)
        return LossOut(
            value=wa * a.value + wp * p.value,
            grad_logits=wa * a.grad_logits + wp * p.grad_logits,
        )

    return combined


class ComboLoss(BaseLoss):
    """
    Active + passive pair named `<active>_<passive>`, e.g. 'nce_agce'.

    Configurable parameters:
    - active_weight, passive_weight: combination weights (default: 1.0, 1.0)
    """

    def __init__(self, active_kind: str, passive_kind: str, params: RobustParams | None = None) -> None:
        super().__init__(params)
        self.active = ActivePassiveLoss(active_kind, self.params)
        self.passive = ActivePassiveLoss(passive_kind, self.params)
        self._fn = combo(self.active, self.passive, self.params.active_weight, self.params.passive_weight)

    @property
    def name(self) -> str:
        return f"{self.active.name}_{self.passive.name}"

    def __call__(self, logits: np.ndarray, labels: np.ndarray) -> LossOut:
        return self._fn(logits, labels)
