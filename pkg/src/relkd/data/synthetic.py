"""
Gaussian blob datasets used as a desk-scale stand-in for image corpora.
"""

import logging

import numpy as np

from relkd.exceptions import ConfigurationError
from relkd.models import Dataset
from relkd.numerics.rng import RngStream

logger = logging.getLogger(__name__)


def blob_centers(num_classes: int, dim: int, radius: float = 4.0) -> np.ndarray:
    """
    Seed-independent class centers.

    Centers sit evenly on a circle of `radius` in the first two coordinates
    (on a line when dim == 1), so train and test splits drawn with different
    seeds share the same geometry.
    """
    angles = 2.0 * np.pi * np.arange(num_classes) / num_classes
    centers = np.zeros((num_classes, dim))
    if dim == 1:
        centers[:, 0] = radius * (np.arange(num_classes) - (num_classes - 1) / 2.0)
    else:
        centers[:, 0] = radius * np.cos(angles)
        centers[:, 1] = radius * np.sin(angles)
    return centers


def make_blobs(
    n: int,
    num_classes: int,
    dim: int,
    spread: float,
    seed: int | RngStream,
    radius: float = 4.0,
) -> Dataset:
    """
    Class-balanced Gaussian clusters with clean labels only.

    Args:
        n: Number of rows (>= num_classes)
        num_classes: Number of clusters C
        dim: Feature dimension D
        spread: Per-coordinate standard deviation around each center (0 gives the centers)
        seed: Integer seed or an RngStream
        radius: Distance of the centers from the origin

    Returns:
        Dataset with noisy_labels == clean_labels, rows shuffled

    Raises:
        ConfigurationError: If n < C or spread is negative
    """
    if n < num_classes:
        raise ConfigurationError(f"n={n} is smaller than the class count {num_classes}", key="dataset.n_train")
    if spread < 0:
        raise ConfigurationError(f"spread must be non-negative, got {spread}", key="dataset.spread")
    if num_classes < 2 or dim < 1:
        raise ConfigurationError(f"need C >= 2 and D >= 1, got C={num_classes}, D={dim}")

    rng = seed if isinstance(seed, RngStream) else RngStream(int(seed))
    base, extra = divmod(n, num_classes)
    counts = np.full(num_classes, base)
    counts[:extra] += 1
    labels = np.repeat(np.arange(num_classes), counts)
    labels = labels[rng.child("order").permutation(n)]

    centers = blob_centers(num_classes, dim, radius)
    noise = rng.child("points").normal(0.0, 1.0, (n, dim))
    features = centers[labels] + spread * noise

    logger.debug(f"Generated {n} blob rows over {num_classes} classes in {dim}-D")
    return Dataset(features=features, clean_labels=labels, noisy_labels=labels.copy(), num_classes=num_classes)
