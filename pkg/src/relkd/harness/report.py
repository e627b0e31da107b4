"""
Aggregate result rows into method x noise grids and K pivots.
"""

import logging
from pathlib import Path

import pandas as pd

from relkd.exceptions import RelkdError
from relkd.harness.results import read_results, results_frame
from relkd.models import ResultRow

logger = logging.getLogger(__name__)


def method_label(row: pd.Series) -> str:
    """'ce', 'ce+RMDNet', 'ce+RGRL(random)' style method names."""
    if row["teacher"] == "none" or row["K"] == 0:
        return row["loss_name"]
    if row["teacher"] == "random":
        return f"{row['loss_name']}+RGRL(random)"
    return f"{row['loss_name']}+RMDNet"


def _mean_std(values: pd.Series) -> str:
    std = values.std(ddof=0) if len(values) > 1 else 0.0
    return f"{100 * values.mean():.2f} ± {100 * std:.2f}"


def noise_grid(rows: list[ResultRow]) -> pd.DataFrame:
    """Rows = method, columns = (noise kind, rate), cells = mean ± std test accuracy in %."""
    if not rows:
        raise RelkdError("No result rows to report")
    df = results_frame(rows)
    df["method"] = df.apply(method_label, axis=1)
    # methods run at several K get one row per K
    distilled_k = df["K"].where((df["teacher"] != "none") & (df["K"] != 0), 0.0)
    multi_k = distilled_k.groupby(df["method"]).transform("nunique") > 1
    if multi_k.any():
        df.loc[multi_k, "method"] = df.loc[multi_k].apply(lambda r: f"{r['method']} K={r['K']:g}", axis=1)
    grid = (
        df.groupby(["method", "noise_kind", "noise_rate"])["test_accuracy"]
        .apply(_mean_std)
        .unstack(["noise_kind", "noise_rate"])
        .sort_index(axis=1)
    )
    return grid


def k_pivot(rows: list[ResultRow]) -> pd.DataFrame:
    """Rows = K, columns = mean/std/n of test accuracy over seeds."""
    if not rows:
        raise RelkdError("No result rows to pivot")
    df = results_frame(rows)
    table = df.groupby("K")["test_accuracy"].agg(
        mean="mean", std=lambda s: float(s.std(ddof=0)), n="count"
    )
    return table.sort_index()


def report(result_paths: list[str | Path], out_dir: str | Path) -> pd.DataFrame:
    """Read result CSVs, write report.csv and return the noise grid."""
    rows: list[ResultRow] = []
    for p in result_paths:
        rows.extend(read_results(p))
    grid = noise_grid(rows)
    out = Path(out_dir) / "report.csv"
    out.parent.mkdir(parents=True, exist_ok=True)
    grid.to_csv(out)
    logger.info(f"Report over {len(rows)} rows written to {out}")
    return grid
