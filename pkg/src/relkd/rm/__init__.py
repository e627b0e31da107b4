"""
Relation modeling: SimSiam-style self-supervised teacher training.
"""

from relkd.rm.pretrain import pretrain_rm
from relkd.rm.simsiam import SimSiamResult, encode, init_ssl_model, neg_cosine, neg_cosine_rows, simsiam_loss

__all__ = [
    "neg_cosine",
    "neg_cosine_rows",
    "simsiam_loss",
    "SimSiamResult",
    "init_ssl_model",
    "encode",
    "pretrain_rm",
]
