import csv
import logging
from pathlib import Path
from typing import Dict, List, Union

import numpy as np

from errors import ResultsIOError
from .experiment import RunRecord
from .stats import ComparisonTable, smoothed_min, tendency, TENDENCY_WINDOW

logger = logging.getLogger(__name__)


def _format(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    value = float(value)
    if np.isnan(value):
        return ""
    if value.is_integer():
        return str(int(value))
    return repr(value)


def write_rows(header: List[str], columns: List[np.ndarray], path) -> Path:
    """Write equal-length columns under header, one row per episode (1-based)"""
    path = Path(path)
    length = max((len(c) for c in columns), default=0)
    try:
        with path.open("w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(header)
            for i in range(length):
                row = [str(i + 1)]
                row.extend(_format(c[i]) if i < len(c) else "" for c in columns)
                writer.writerow(row)
    except OSError as e:
        raise ResultsIOError(path, f"cannot write CSV: {e}") from e
    logger.info("Wrote %d rows to %s", length, path)
    return path


def write_csv(result: Union[RunRecord, ComparisonTable], path) -> Path:
    """RunRecord -> episode,steps; ComparisonTable -> episode,<label1>,<label2>,... (mean across seeds)"""
    if isinstance(result, RunRecord):
        return write_rows(["episode", "steps"], [result.steps_per_episode], path)
    labels = result.labels
    return write_rows(["episode", *labels], [result.series[label] for label in labels], path)


def read_csv(path) -> Dict[str, np.ndarray]:
    """Columns of a file written by write_csv, keyed by header name; empty cells read as NaN"""
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8", newline="") as f:
            rows = list(csv.reader(f))
    except OSError as e:
        raise ResultsIOError(path, f"cannot read CSV: {e}") from e
    if not rows:
        raise ResultsIOError(path, "CSV file is empty")

    header, body = rows[0], rows[1:]
    columns: Dict[str, np.ndarray] = {}
    try:
        for j, name in enumerate(header):
            cells = [row[j] if j < len(row) else "" for row in body]
            if all(c and c.lstrip("-").isdigit() for c in cells):
                columns[name] = np.array([int(c) for c in cells], dtype=np.int64)
            else:
                columns[name] = np.array([float(c) if c else np.nan for c in cells])
    except ValueError as e:
        raise ResultsIOError(path, f"malformed CSV: {e}") from e
    return columns


def write_tendency_csv(columns: Dict[str, np.ndarray], path, window: int = TENDENCY_WINDOW,
                       two_point: bool = False) -> Path:
    """For every data column: its tendency and its smoothed minimum"""
    header = ["episode"]
    out = []
    for name, values in columns.items():
        if name == "episode":
            continue
        values = values[~np.isnan(values.astype(np.float64))]
        header.extend([f"{name}_tendency", f"{name}_min"])
        out.append(tendency(values, window))
        out.append(smoothed_min(values, window, two_point))
    return write_rows(header, out, path)
