"""
Central-difference gradient oracle.

Every analytic gradient in the package is checked against fd_grad in tests.
"""

from typing import Callable

import numpy as np

from relkd.exceptions import GradientOracleError


def fd_grad(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """
    Central-difference gradient of a scalar function.

    Args:
        f: Scalar-valued function of a flat vector
        x: Point of evaluation (any shape; differentiated elementwise)
        h: Step size, must be positive

    Returns:
        Array shaped like x with (f(x + h e_i) - f(x - h e_i)) / 2h

    Raises:
        GradientOracleError: If f is non-finite at a probe point
    """
    if h <= 0:
        raise ValueError(f"step h must be positive, got {h}")
    base = np.array(x, dtype=np.float64, copy=True)
    flat = base.reshape(-1)
    grad = np.zeros_like(flat)
    for i in range(flat.size):
        old = flat[i]
        flat[i] = old + h
        right = float(f(base))
        flat[i] = old - h
        left = float(f(base))
        flat[i] = old
        if not (np.isfinite(right) and np.isfinite(left)):
            raise GradientOracleError(f"non-finite function value probing coordinate {i}")
        grad[i] = (right - left) / (2.0 * h)
    return grad.reshape(base.shape)


def relative_error(analytic: np.ndarray, numeric: np.ndarray, floor: float = 1e-8) -> np.ndarray:
    """Elementwise |a - n| / max(|a|, |n|, floor)."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    return np.abs(a - n) / np.maximum(np.maximum(np.abs(a), np.abs(n)), floor)


def assert_grad_close(
    analytic: np.ndarray, numeric: np.ndarray, rtol: float = 1e-4, atol: float = 1e-8
) -> None:
    """Assert relative agreement with an absolute floor for near-zero entries."""
    a = np.asarray(analytic, dtype=np.float64)
    n = np.asarray(numeric, dtype=np.float64)
    if a.shape != n.shape:
        raise AssertionError(f"gradient shapes differ: {a.shape} vs {n.shape}")
    diff = np.abs(a - n)
    ok = (diff <= atol) | (diff <= rtol * np.maximum(np.abs(a), np.abs(n)))
    if not np.all(ok):
        worst = int(np.argmax(np.where(ok, 0.0, diff)))
        raise AssertionError(
            f"gradient mismatch at flat index {worst}: analytic={a.ravel()[worst]!r} "
            f"numeric={n.ravel()[worst]!r} (rtol={rtol}, atol={atol})"
        )
