"""
Pearson relation graphs over a batch of representations.

Correlations are taken across the feature dimension of each row, so every
row is standardized on its own and only row-to-row structure remains.
"""

import numpy as np

from relkd.exceptions import DimensionError
from relkd.models import EdgeMatrix, NodeMatrix, RepBatch
from relkd.numerics.linalg import EPS


def pearson_edge(x: np.ndarray, y: np.ndarray, eps: float = EPS) -> float:
    """
    Pearson correlation of two representation vectors.

    Returns 0 when either vector is constant (centered norm below eps).

    Raises:
        DimensionError: If lengths differ or D < 2
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DimensionError(f"pearson_edge length mismatch: {x.shape} vs {y.shape}")
    if x.size < 2:
        raise DimensionError(f"pearson_edge needs D >= 2, got {x.size}")
    xc = x - x.mean()
    yc = y - y.mean()
    nx = np.linalg.norm(xc)
    ny = np.linalg.norm(yc)
    if nx < eps or ny < eps:
        return 0.0
    return float(xc @ yc / (nx * ny))


def standardize_rows(reps: RepBatch, eps: float = EPS) -> tuple[np.ndarray, np.ndarray]:
    """
    Center each row and scale it to unit norm.

    Returns:
        Unit rows (zero for degenerate rows) and the centered norms
    """
    x = np.asarray(reps, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"representation batch must be 2-D, got shape {x.shape}")
    if x.shape[1] < 2:
        raise DimensionError(f"correlation needs D >= 2, got {x.shape[1]}")
    xc = x - x.mean(axis=1, keepdims=True)
    norms = np.linalg.norm(xc, axis=1)
    units = np.zeros_like(xc)
    live = norms >= eps
    units[live] = xc[live] / norms[live, None]
    return units, norms


def standardize_rows_backward(units: np.ndarray, norms: np.ndarray, grad_units: np.ndarray, eps: float = EPS) -> np.ndarray:
    """Pull a gradient on unit rows back to the raw representation rows."""
    live = norms >= eps
    grad = np.zeros_like(grad_units)
    g = grad_units[live]
    u = units[live]
    grad[live] = (g - np.sum(g * u, axis=1, keepdims=True) * u) / norms[live, None]
    return grad - grad.mean(axis=1, keepdims=True)


def edge_matrix(reps: RepBatch) -> EdgeMatrix:
    """
    B x B within-batch correlations with the diagonal forced to 1.

    Raises:
        DimensionError: If B < 2 or D < 2
    """
    units, _ = standardize_rows(reps)
    if units.shape[0] < 2:
        raise DimensionError(f"edge_matrix needs B >= 2, got {units.shape[0]}")
    e = units @ units.T
    np.fill_diagonal(e, 1.0)
    return e


def node_matrix(teacher: RepBatch, student: RepBatch) -> NodeMatrix:
    """
    Cross-channel correlations: M[i, j] = pearson(teacher_i, student_j).

    Raises:
        DimensionError: If the batches differ in shape
    """
    t = np.asarray(teacher, dtype=np.float64)
    s = np.asarray(student, dtype=np.float64)
    if t.shape != s.shape:
        raise DimensionError(f"node_matrix needs equal shapes, got teacher {t.shape} and student {s.shape}")
    ut, _ = standardize_rows(t)
    us, _ = standardize_rows(s)
    return ut @ us.T
