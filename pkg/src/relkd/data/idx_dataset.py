"""
IDX (MNIST-format) ingestion behind the same Dataset contract.
"""

import gzip
import logging
from pathlib import Path

import numpy as np

from relkd.exceptions import IngestionError
from relkd.models import Dataset

logger = logging.getLogger(__name__)

_IDX_DTYPES = {
    0x08: np.uint8,
    0x09: np.int8,
    0x0B: np.dtype(">i2"),
    0x0C: np.dtype(">i4"),
    0x0D: np.dtype(">f4"),
    0x0E: np.dtype(">f8"),
}


def read_idx(path: str | Path) -> np.ndarray:
    """Read one IDX array (optionally gzip-compressed)."""
    path = Path(path)
    if not path.exists():
        raise IngestionError(f"IDX file not found: {path}")
    opener = gzip.open if path.suffix == ".gz" else open
    with opener(path, "rb") as f:
        raw = f.read()
    if len(raw) < 4 or raw[0] != 0 or raw[1] != 0:
        raise IngestionError(f"Bad IDX magic number in {path}")
    dtype = _IDX_DTYPES.get(raw[2])
    if dtype is None:
        raise IngestionError(f"Unknown IDX type code 0x{raw[2]:02x} in {path}")
    ndim = raw[3]
    header_end = 4 + 4 * ndim
    dims = tuple(int.from_bytes(raw[4 + 4 * i: 8 + 4 * i], "big") for i in range(ndim))
    data = np.frombuffer(raw, dtype=dtype, offset=header_end)
    expected = int(np.prod(dims)) if dims else 0
    if data.size != expected:
        raise IngestionError(f"IDX payload has {data.size} values, header declares {expected} in {path}")
    return data.reshape(dims)


def load_idx(images_path: str | Path, labels_path: str | Path, num_classes: int | None = None) -> Dataset:
    """
    Load an image/label IDX pair as flattened features scaled to [0, 1].

    Raises:
        IngestionError: On malformed files, count mismatch or label range violation
    """
    images = read_idx(images_path)
    labels = read_idx(labels_path).astype(np.int64).ravel()
    if images.shape[0] != labels.shape[0]:
        raise IngestionError(f"{images.shape[0]} images but {labels.shape[0]} labels")
    features = images.reshape(images.shape[0], -1).astype(np.float64)
    if images.dtype == np.uint8:
        features /= 255.0
    C = num_classes if num_classes is not None else int(labels.max()) + 1
    if labels.min() < 0 or labels.max() >= C:
        raise IngestionError(f"labels outside [0, {C}) in {labels_path}")
    logger.info(f"Loaded {labels.size} IDX samples of width {features.shape[1]}")
    return Dataset(features=features, clean_labels=labels, noisy_labels=labels.copy(), num_classes=C)
