"""
CSV emit/parse for result rows and training histories.
"""

import logging
from dataclasses import asdict, fields
from pathlib import Path

import pandas as pd

from relkd.exceptions import RelkdError
from relkd.models import EpochRecord, ResultRow, TrainHistory

logger = logging.getLogger(__name__)

RESULT_COLUMNS = [f.name for f in fields(ResultRow)]
HISTORY_COLUMNS = [f.name for f in fields(EpochRecord)]


def sort_rows(rows: list[ResultRow]) -> list[ResultRow]:
    """Order by (config id, seed), independent of completion order."""
    return sorted(rows, key=lambda r: (r.config_id, r.seed))


def results_frame(rows: list[ResultRow]) -> pd.DataFrame:
    return pd.DataFrame([asdict(r) for r in sort_rows(rows)], columns=RESULT_COLUMNS)


def write_results(rows: list[ResultRow], path: str | Path) -> Path:
    """Write result rows sorted by (config id, seed)."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    try:
        results_frame(rows).to_csv(path, index=False)
    except OSError as e:
        raise RelkdError(f"Cannot write results to {path}: {e}") from e
    logger.info(f"Wrote {len(rows)} result rows to {path}")
    return path


def read_results(path: str | Path) -> list[ResultRow]:
    path = Path(path)
    if not path.exists():
        raise RelkdError(f"Results file not found: {path}")
    df = pd.read_csv(
        path,
        dtype={"config_id": str, "noise_kind": str, "loss_name": str, "teacher": str},
        float_precision="round_trip",
    )
    return [
        ResultRow(
            config_id=r.config_id,
            seed=int(r.seed),
            noise_kind=r.noise_kind,
            noise_rate=float(r.noise_rate),
            loss_name=r.loss_name,
            K=float(r.K),
            test_accuracy=float(r.test_accuracy),
            wall_time=float(r.wall_time),
            teacher=r.teacher,
        )
        for r in df.itertuples(index=False)
    ]


def write_history(history: TrainHistory, path: str | Path) -> Path:
    """Columns: epoch, base_loss, rmd_loss, total_loss, train_acc, test_acc."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    df = pd.DataFrame([asdict(r) for r in history.records], columns=HISTORY_COLUMNS)
    try:
        df.to_csv(path, index=False)
    except OSError as e:
        raise RelkdError(f"Cannot write history to {path}: {e}") from e
    return path


def read_history(path: str | Path) -> TrainHistory:
    path = Path(path)
    if not path.exists():
        raise RelkdError(f"History file not found: {path}")
    df = pd.read_csv(path, float_precision="round_trip")
    history = TrainHistory()
    for r in df.itertuples(index=False):
        history.append(EpochRecord(
            epoch=int(r.epoch),
            base_loss=float(r.base_loss),
            rmd_loss=float(r.rmd_loss),
            total_loss=float(r.total_loss),
            train_acc=float(r.train_acc),
            test_acc=float(r.test_acc),
        ))
    return history
