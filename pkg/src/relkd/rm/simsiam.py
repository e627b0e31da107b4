"""
SimSiam objective: symmetric negative cosine between predictor outputs and
stop-gradient encoder targets.
"""

from dataclasses import dataclass

import numpy as np

from relkd.exceptions import DimensionError
from relkd.models import ModelSpec, SslModel, ViewPair
from relkd.numerics.linalg import EPS
from relkd.numerics.mlp import init_mlp, mlp_backward, mlp_forward
from relkd.numerics.rng import RngStream


def neg_cosine_rows(q: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Row-wise -cos(q_i, y_i).

    Returns:
        values (B,), gradient w.r.t. q, gradient w.r.t. y
    """
    q_norm = np.maximum(np.linalg.norm(q, axis=1, keepdims=True), EPS)
    y_norm = np.maximum(np.linalg.norm(y, axis=1, keepdims=True), EPS)
    q_hat = q / q_norm
    y_hat = y / y_norm
    cos = np.sum(q_hat * y_hat, axis=1, keepdims=True)
    grad_q = -(y_hat - cos * q_hat) / q_norm
    grad_y = -(q_hat - cos * y_hat) / y_norm
    return -cos[:, 0], grad_q, grad_y


def neg_cosine(q: np.ndarray, y: np.ndarray) -> tuple[float, np.ndarray]:
    """-(q/|q|) . (y/|y|) and its gradient w.r.t. q only."""
    value, grad_q, _ = neg_cosine_rows(np.atleast_2d(q), np.atleast_2d(y))
    return float(value[0]), grad_q[0]


@dataclass
class SimSiamResult:
    """Loss value, parameter gradients and the gradient reaching each target."""

    value: float
    grads: SslModel
    target_grads: tuple[np.ndarray, np.ndarray]


def init_ssl_model(in_dim: int, spec: ModelSpec, rng: RngStream) -> SslModel:
    """Encoder in_dim -> hidden... -> rep_dim and predictor rep_dim -> pred_hidden -> rep_dim."""
    encoder = init_mlp([in_dim, *spec.encoder_hidden, spec.rep_dim], rng.child("encoder"), spec.activation)
    predictor = init_mlp([spec.rep_dim, spec.predictor_hidden, spec.rep_dim], rng.child("predictor"), spec.activation)
    return SslModel(encoder_f=encoder, predictor_m=predictor)


def encode(model: SslModel, x: np.ndarray) -> np.ndarray:
    """Teacher representation f(x)."""
    return mlp_forward(model.encoder_f, x)[0]


def simsiam_loss(model: SslModel, views: ViewPair, stop_gradient: bool = True) -> SimSiamResult:
    """
    Symmetric SimSiam loss over a batch of view pairs.

    value = 1/2 D(m(f(v)), sg(f(v'))) + 1/2 D(m(f(v')), sg(f(v))), batch-averaged.
    With stop_gradient the targets receive exactly zero gradient; turning it
    off is a diagnostic mode that lets gradients flow into the targets too.

    Raises:
        DimensionError: If the views differ in shape or do not fit the encoder
    """
    if views.v.shape != views.v_prime.shape:
        raise DimensionError(f"view shapes differ: {views.v.shape} vs {views.v_prime.shape}")
    B = views.v.shape[0]
    z1, enc_cache1 = mlp_forward(model.encoder_f, views.v)
    z2, enc_cache2 = mlp_forward(model.encoder_f, views.v_prime)
    p1, pred_cache1 = mlp_forward(model.predictor_m, z1)
    p2, pred_cache2 = mlp_forward(model.predictor_m, z2)

    d1, g_p1, g_t2 = neg_cosine_rows(p1, z2)
    d2, g_p2, g_t1 = neg_cosine_rows(p2, z1)
    value = 0.5 * d1.mean() + 0.5 * d2.mean()

    scale = 0.5 / B
    g_p1 *= scale
    g_p2 *= scale
    if stop_gradient:
        target_grad1 = np.zeros_like(z1)
        target_grad2 = np.zeros_like(z2)
    else:
        target_grad1 = g_t1 * scale
        target_grad2 = g_t2 * scale

    pred_grads1, g_z1 = mlp_backward(model.predictor_m, pred_cache1, g_p1)
    pred_grads2, g_z2 = mlp_backward(model.predictor_m, pred_cache2, g_p2)
    enc_grads1, _ = mlp_backward(model.encoder_f, enc_cache1, g_z1 + target_grad1)
    enc_grads2, _ = mlp_backward(model.encoder_f, enc_cache2, g_z2 + target_grad2)

    grads = SslModel(
        encoder_f=enc_grads1.with_parameters(
            [a + b for a, b in zip(enc_grads1.parameters(), enc_grads2.parameters())]
        ),
        predictor_m=pred_grads1.with_parameters(
            [a + b for a, b in zip(pred_grads1.parameters(), pred_grads2.parameters())]
        ),
    )
    return SimSiamResult(value=float(value), grads=grads, target_grads=(target_grad1, target_grad2))
