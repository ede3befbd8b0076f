"""CSV/JSON persistence for experiment results."""

from __future__ import annotations

import csv
import json
import math
from pathlib import Path

from skyharvest.harness.experiments import ExperimentResult


def format_value(value) -> str:
    if value is None:
        return ""
    if isinstance(value, bool):
        return str(int(value))
    if isinstance(value, float):
        return "nan" if math.isnan(value) else f"{value:.6g}"
    return str(value)


def write_rows(path: Path, columns: list[str], rows: list[dict]) -> None:
    try:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh, lineterminator="\r\n")
            writer.writerow(columns)
            for row in rows:
                writer.writerow([format_value(row.get(c)) for c in columns])
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def emit_csv(result: ExperimentResult, path: str | Path) -> Path:
    """Write records as RFC-4180 CSV plus a sibling ``.json`` with the metadata.

    Returns the metadata path.
    """
    path = Path(path)
    write_rows(path, result.columns, result.records)
    meta_path = path.with_suffix(".json")
    try:
        meta_path.write_text(json.dumps(result.metadata, indent=2, default=str))
    except OSError as exc:
        raise OSError(f"cannot write {meta_path}: {exc.strerror or exc}") from exc
    return meta_path


def emit_summary(result: ExperimentResult, path: str | Path) -> None:
    columns, rows = result.summary()
    write_rows(Path(path), columns, rows)
