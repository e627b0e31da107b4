"""
Base and robust classification losses with analytic logit gradients.
"""

from relkd.losses.active_passive import ActivePassiveLoss, active_passive, ael, agce, aul, mae, nce
from relkd.losses.base import BaseLoss
from relkd.losses.classic import CrossEntropyLoss, GCELoss, SCELoss, ce, gce, rce, sce
from relkd.losses.combo import ComboLoss, combo
from relkd.losses.factory import LossFactory

__all__ = [
    "BaseLoss",
    "ce",
    "gce",
    "rce",
    "sce",
    "nce",
    "mae",
    "agce",
    "aul",
    "ael",
    "active_passive",
    "combo",
    "CrossEntropyLoss",
    "GCELoss",
    "SCELoss",
    "ActivePassiveLoss",
    "ComboLoss",
    "LossFactory",
]
