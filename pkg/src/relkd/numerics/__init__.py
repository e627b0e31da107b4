"""
Dense float64 numerics: matrix helpers, MLP stacks, gradient oracle, seeded streams.
"""

from relkd.numerics.gradcheck import assert_grad_close, fd_grad, relative_error
from relkd.numerics.linalg import (
    EPS,
    as_mat,
    l2_normalize_rows,
    log_softmax_rows,
    matmul,
    softmax_rows,
)
from relkd.numerics.mlp import Layer, MlpCache, MlpParams, init_mlp, mlp_backward, mlp_forward
from relkd.numerics.rng import RngStream

__all__ = [
    "EPS",
    "as_mat",
    "matmul",
    "softmax_rows",
    "log_softmax_rows",
    "l2_normalize_rows",
    "Layer",
    "MlpParams",
    "MlpCache",
    "init_mlp",
    "mlp_forward",
    "mlp_backward",
    "fd_grad",
    "relative_error",
    "assert_grad_close",
    "RngStream",
]
