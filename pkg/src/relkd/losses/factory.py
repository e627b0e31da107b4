"""
LossFactory - Config-driven loss instantiation.
"""

import logging

from relkd.exceptions import ConfigurationError
from relkd.losses.active_passive import ActivePassiveLoss
from relkd.losses.base import BaseLoss
from relkd.losses.classic import CrossEntropyLoss, GCELoss, SCELoss
from relkd.losses.combo import ComboLoss
from relkd.models import LossSpec

logger = logging.getLogger(__name__)


class LossFactory:
    """Name-driven loss construction."""

    # Loss registry - single losses by name
    LOSS_CLASSES: dict[str, type[BaseLoss]] = {
        "ce": CrossEntropyLoss,
        "gce": GCELoss,
        "sce": SCELoss,
    }

    SINGLE_AP = ("mae", "nce", "agce", "aul", "ael")
    COMBOS = ("nce_agce", "nce_aul", "nce_ael", "nce_mae")

    @classmethod
    def names(cls) -> list[str]:
        return list(cls.LOSS_CLASSES) + list(cls.SINGLE_AP) + list(cls.COMBOS)

    @classmethod
    def create(cls, spec: LossSpec) -> BaseLoss:
        """Create a loss from its spec."""
        name = spec.name.lower()
        if name in cls.LOSS_CLASSES:
            loss = cls.LOSS_CLASSES[name](spec.params)
        elif name in cls.SINGLE_AP:
            loss = ActivePassiveLoss(name, spec.params)
        elif name in cls.COMBOS:
            active, passive = name.split("_")
            loss = ComboLoss(active, passive, spec.params)
        else:
            raise ConfigurationError(f"Unknown loss '{spec.name}', expected one of {cls.names()}", key="loss.name")
        logger.debug(f"Created loss {loss!r}")
        return loss
