"""
Relation-graph distillation losses: edge matching, node matching and their
weighted combination. Gradients reach the student representations only.
"""

import logging
from dataclasses import dataclass

import numpy as np

from relkd.exceptions import ConfigurationError, DimensionError
from relkd.models import EdgeMatrix, NodeMatrix, RepBatch, RmdWeights
from relkd.relation.pearson import standardize_rows, standardize_rows_backward

logger = logging.getLogger(__name__)

NORMS = ("frobenius", "mse")


def _matrix_distance(target: np.ndarray, current: np.ndarray, norm: str) -> tuple[float, np.ndarray]:
    """Distance between matrices and its gradient w.r.t. `current`."""
    residual = current - target
    if norm == "frobenius":
        value = float(np.linalg.norm(residual))
        if value == 0.0:
            return 0.0, np.zeros_like(residual)
        return value, residual / value
    if norm == "mse":
        return float(np.mean(residual * residual)), 2.0 * residual / residual.size
    raise ConfigurationError(f"Unknown matching norm '{norm}', expected one of {NORMS}", key="rmd.norm")


def edge_loss(et: EdgeMatrix, es: EdgeMatrix, norm: str = "frobenius") -> tuple[float, np.ndarray]:
    """||E_t - E_s||; gradient w.r.t. the student edge matrix."""
    et = np.asarray(et, dtype=np.float64)
    es = np.asarray(es, dtype=np.float64)
    if et.shape != es.shape:
        raise DimensionError(f"edge matrices differ in shape: {et.shape} vs {es.shape}")
    return _matrix_distance(et, es, norm)


def node_loss(m: NodeMatrix, norm: str = "frobenius") -> tuple[float, np.ndarray]:
    """||M_st - I||; gradient w.r.t. the node matrix entries."""
    m = np.asarray(m, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise DimensionError(f"node matrix must be square, got {m.shape}")
    return _matrix_distance(np.eye(m.shape[0]), m, norm)


@dataclass
class RmdOut:
    """Distillation loss with its parts and gradients."""

    value: float
    node: float
    edge: float
    grad_student: np.ndarray
    grad_teacher: np.ndarray


def rmdnet_loss(
    nt: RepBatch, ns: RepBatch, weights: RmdWeights | None = None, norm: str = "frobenius"
) -> RmdOut:
    """
    alpha * L_node + beta * L_edge between teacher and student batches.

    The teacher channel is a constant: `grad_teacher` is always zero.

    Raises:
        DimensionError: Shape mismatch or B < 2
    """
    weights = weights or RmdWeights()
    t = np.asarray(nt, dtype=np.float64)
    s = np.asarray(ns, dtype=np.float64)
    if t.shape != s.shape:
        raise DimensionError(f"teacher {t.shape} and student {s.shape} batches differ")
    if t.shape[0] < 2:
        raise DimensionError(f"rmdnet_loss needs B >= 2, got {t.shape[0]}")

    ut, _ = standardize_rows(t)
    us, s_norms = standardize_rows(s)

    et = ut @ ut.T
    np.fill_diagonal(et, 1.0)
    es = us @ us.T
    np.fill_diagonal(es, 1.0)
    m = ut @ us.T

    l_edge, g_es = edge_loss(et, es, norm)
    l_node, g_m = node_loss(m, norm)

    # forced diagonal is constant
    np.fill_diagonal(g_es, 0.0)
    g_us = weights.beta * (g_es + g_es.T) @ us + weights.alpha * g_m.T @ ut
    grad_student = standardize_rows_backward(us, s_norms, g_us)

    return RmdOut(
        value=weights.alpha * l_node + weights.beta * l_edge,
        node=l_node,
        edge=l_edge,
        grad_student=grad_student,
        grad_teacher=np.zeros_like(t),
    )
