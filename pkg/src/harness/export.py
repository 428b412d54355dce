"""Sweep result files: trial CSV, full JSON and per-series plot data."""

import csv
import io
import logging
from pathlib import Path

from pydantic import ValidationError

from src.errors import DataError
from src.harness.schemas import SweepResult, TrialRecord
from src.harness.sweep import summarize_cells

logger = logging.getLogger(__name__)

CSV_COLUMNS = [
    "treatment",
    "layer",
    "magnitude",
    "trial",
    "seed",
    "top_k",
    "accuracy",
    "n_images",
    "wall_ms",
]
SERIES_COLUMNS = ["magnitude", "mean", "std", "trials"]


def canonical_records(result):
    """Records sorted by (treatment, layer, magnitude) grid index, then trial.

    Without a config echo the stored order is kept.
    """
    if result.config is None:
        return list(result.records)
    config = result.config
    treatments = {t: i for i, t in enumerate(config.treatments)}
    layers = {name: i for i, name in enumerate(config.layers)}
    magnitudes = {m: i for i, m in enumerate(config.magnitudes)}
    return sorted(
        result.records,
        key=lambda r: (treatments[r.treatment], layers[r.layer], magnitudes[r.magnitude], r.trial),
    )


def to_csv(result):
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(CSV_COLUMNS)
    for r in canonical_records(result):
        writer.writerow(
            [
                r.treatment,
                r.layer,
                repr(r.magnitude),
                r.trial,
                r.seed,
                r.top_k,
                repr(r.accuracy),
                r.n_images,
                f"{r.wall_ms:.3f}",
            ]
        )
    return buffer.getvalue()


def to_json(result):
    return result.model_dump_json(indent=2) + "\n"


def export(result, fmt, path):
    """Write `result` as ``csv`` or ``json``; returns the path."""
    if fmt == "csv":
        text = to_csv(result)
    elif fmt == "json":
        text = to_json(result)
    else:
        raise DataError(f"unknown export format {fmt!r}; use csv or json")
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    logger.info("wrote %d records to %s", len(result.records), path)
    return path


def _read_csv(text):
    reader = csv.DictReader(io.StringIO(text))
    if reader.fieldnames != CSV_COLUMNS:
        raise DataError(f"CSV header {reader.fieldnames} is not {CSV_COLUMNS}")
    records = [TrialRecord.model_validate(row) for row in reader]
    return SweepResult(records=records, cells=summarize_cells(records))


def load_result(path):
    """Read a sweep result from JSON (complete) or CSV (records; baseline unknown)."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise DataError(f"cannot read sweep result {path}: {exc}") from exc
    try:
        if text.lstrip().startswith("{"):
            return SweepResult.model_validate_json(text)
        return _read_csv(text)
    except ValidationError as exc:
        raise DataError(f"{path} is not a valid sweep result: {exc}") from exc


def plot_series(result):
    """One (magnitude, mean, std, trials) series per (treatment, layer), magnitudes ascending."""
    series = {}
    for cell in result.cells:
        series.setdefault((cell.treatment, cell.layer), []).append(
            (cell.magnitude, cell.mean, cell.std, cell.trials)
        )
    return {key: sorted(rows) for key, rows in series.items()}


def write_plot_series(result, out_dir):
    """Write ``<treatment>__<layer>.csv`` per series; returns the written paths."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []
    for (treatment, layer), rows in plot_series(result).items():
        path = out_dir / f"{treatment}__{layer}.csv"
        with open(path, "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(SERIES_COLUMNS)
            for magnitude, mean, std, trials in rows:
                writer.writerow([repr(magnitude), repr(mean), repr(std), trials])
        paths.append(path)
    logger.info("wrote %d plot series to %s", len(paths), out_dir)
    return paths
