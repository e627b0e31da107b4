"""
Embedding dumps for external visualisation (t-SNE etc. happen elsewhere).
"""

import logging
from pathlib import Path

import numpy as np
import pandas as pd

from relkd.exceptions import DimensionError, RelkdError
from relkd.models import Dataset, SslModel, TaskModel
from relkd.numerics.mlp import MlpParams, mlp_forward

logger = logging.getLogger(__name__)


def _encoder(model: TaskModel | SslModel | MlpParams) -> MlpParams:
    if isinstance(model, TaskModel):
        return model.encoder
    if isinstance(model, SslModel):
        return model.encoder_f
    if isinstance(model, MlpParams):
        return model
    raise TypeError(f"Cannot embed with object of type {type(model).__name__}")


def embedding_frame(model: TaskModel | SslModel | MlpParams, ds: Dataset, classes: list[int] | None = None) -> pd.DataFrame:
    """Representation coordinates plus clean label, noisy label and corruption flag per row."""
    encoder = _encoder(model)
    if ds.dim != encoder.in_width:
        raise DimensionError(f"dataset width {ds.dim} does not match encoder input {encoder.in_width}")
    keep = np.ones(ds.n, dtype=bool) if classes is None else np.isin(ds.clean_labels, classes)
    reps, _ = mlp_forward(encoder, ds.features[keep])
    df = pd.DataFrame(reps, columns=[f"z{i}" for i in range(reps.shape[1])])
    df["clean_label"] = ds.clean_labels[keep]
    df["noisy_label"] = ds.noisy_labels[keep]
    df["corrupted"] = ds.corruption_mask[keep].astype(int)
    return df


def dump_embeddings(
    model: TaskModel | SslModel | MlpParams,
    ds: Dataset,
    path: str | Path,
    classes: list[int] | None = None,
) -> Path:
    """
    Write one CSV row per sample (optionally only the given clean classes).

    Raises:
        DimensionError: If the model does not fit the dataset
        RelkdError: On I/O failure, naming the path
    """
    path = Path(path)
    df = embedding_frame(model, ds, classes)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        df.to_csv(path, index=False)
    except OSError as e:
        raise RelkdError(f"Cannot write embeddings to {path}: {e}") from e
    logger.info(f"Wrote {len(df)} embeddings to {path}")
    return path


def read_embeddings(path: str | Path) -> pd.DataFrame:
    return pd.read_csv(path, float_precision="round_trip")
