"""
CSV dataset ingestion: numeric feature columns followed by an integer label.
"""

import logging
import re
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from relkd.exceptions import IngestionError
from relkd.models import Dataset

logger = logging.getLogger(__name__)

_PANDAS_LINE = re.compile(r"line (\d+)")


@dataclass
class CsvSchema:
    """How to read a dataset CSV."""

    header: bool | None = None  # None: detect from the first row
    num_classes: int | None = None  # None: max label + 1


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def _detect_header(path: Path) -> bool:
    with open(path) as f:
        first = f.readline().strip()
    return bool(first) and not all(_is_number(tok) for tok in first.split(","))


def _data_lines(path: Path, header: bool) -> np.ndarray:
    """File line number of every data row; blank lines are skipped as pandas skips them."""
    with open(path) as f:
        numbers = [n for n, line in enumerate(f, start=1) if line.strip()]
    return np.asarray(numbers[1:] if header else numbers, dtype=np.int64)


def load_csv(path: str | Path, schema: CsvSchema | None = None) -> Dataset:
    """
    Load a labelled dataset from CSV.

    Args:
        path: CSV file; the final column is the integer class label
        schema: Header handling and optional class-count override

    Returns:
        Dataset with rows in file order and noisy_labels == clean_labels

    Raises:
        IngestionError: Missing/empty file, ragged rows, unparsable values,
            or labels outside [0, C); the message names the file line
    """
    path = Path(path)
    schema = schema or CsvSchema()
    if not path.exists():
        raise IngestionError(f"Dataset CSV not found: {path}")

    header = _detect_header(path) if schema.header is None else schema.header
    lines = _data_lines(path, header)

    def line_of(row: int) -> int:
        return int(lines[row]) if row < len(lines) else row + (2 if header else 1)

    try:
        df = pd.read_csv(path, header=0 if header else None, dtype=str, skip_blank_lines=True)
    except pd.errors.EmptyDataError as e:
        raise IngestionError(f"Empty dataset file: {path}") from e
    except pd.errors.ParserError as e:
        match = _PANDAS_LINE.search(str(e))
        raise IngestionError(f"Ragged row in {path}", line=int(match.group(1)) if match else None) from e

    if df.empty:
        raise IngestionError(f"Empty dataset file: {path}")
    if df.shape[1] < 2:
        raise IngestionError(f"Need at least one feature column and a label column in {path}", line=line_of(0))

    short_rows = df.isna().any(axis=1).to_numpy()
    if short_rows.any():
        raise IngestionError(f"Ragged or empty field in {path}", line=line_of(int(np.argmax(short_rows))))

    values = df.apply(pd.to_numeric, errors="coerce")
    bad = values.isna().any(axis=1).to_numpy()
    if bad.any():
        raise IngestionError(f"Unparsable value in {path}", line=line_of(int(np.argmax(bad))))

    features = values.iloc[:, :-1].to_numpy(dtype=np.float64)
    raw_labels = values.iloc[:, -1].to_numpy(dtype=np.float64)
    non_integer = raw_labels != np.round(raw_labels)
    if non_integer.any():
        raise IngestionError(f"Non-integer label in {path}", line=line_of(int(np.argmax(non_integer))))
    labels = raw_labels.astype(np.int64)

    num_classes = schema.num_classes if schema.num_classes is not None else int(labels.max()) + 1
    out_of_range = (labels < 0) | (labels >= num_classes)
    if out_of_range.any():
        i = int(np.argmax(out_of_range))
        raise IngestionError(
            f"Label {labels[i]} outside range [0, {num_classes}) in {path}", line=line_of(i)
        )

    logger.info(f"Loaded {len(labels)} rows x {features.shape[1]} features, C={num_classes} from {path}")
    return Dataset(features=features, clean_labels=labels, noisy_labels=labels.copy(), num_classes=num_classes)
