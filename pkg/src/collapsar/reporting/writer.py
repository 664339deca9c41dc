"""Run report: persist tables, summaries and figures of one run."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Iterable

import numpy as np
import pandas as pd

from collapsar.core.constants import CSV_DIGITS
from collapsar.core.errors import ConfigError, DataError

logger = logging.getLogger(__name__)


@dataclass
class RunReport:
    """Everything a subcommand produced, keyed by output stem.

    tables  -> <stem>.csv (and a "tables" block in the JSON)
    summary -> <name>.json
    figures -> <stem>.svg / <stem>.html
    """

    name: str
    summary: dict[str, Any] = field(default_factory=dict)
    tables: dict[str, pd.DataFrame] = field(default_factory=dict)
    figures: dict[str, Any] = field(default_factory=dict)
    text: str = ""


def _jsonable(value: Any) -> Any:
    """Plain Python values; non-finite floats become null."""
    if isinstance(value, dict):
        return {str(k): _jsonable(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_jsonable(v) for v in value]
    if isinstance(value, np.generic):
        value = value.item()
    if isinstance(value, float):
        return value if math.isfinite(value) else None
    if value is None or isinstance(value, (bool, int, str)):
        return value
    return str(value)


def report_json(report: RunReport) -> str:
    """JSON text with fixed key order; floats keep their shortest round-trip repr."""
    payload = {
        "name": report.name,
        "summary": _jsonable(report.summary),
        "tables": {
            stem: _jsonable(df.astype(object).where(df.notna(), None).to_dict(orient="records"))
            for stem, df in report.tables.items()
        },
    }
    return json.dumps(payload, indent=2, allow_nan=False) + "\n"


def _write(path: Path, writer) -> Path:
    try:
        writer(path)
    except OSError as e:
        raise DataError(f"Failed to write {path}: {e}") from e
    return path


def write_outputs(report: RunReport, formats: Iterable[str], out_dir: str | Path) -> list[Path]:
    """Write the requested formats into out_dir and return the files written."""
    formats = list(formats)
    unknown = set(formats) - {"csv", "json", "svg", "html"}
    if unknown:
        raise ConfigError(f"Unknown output format(s): {', '.join(sorted(unknown))}")

    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise DataError(f"Cannot create output directory {out}: {e}") from e

    written: list[Path] = []
    if "csv" in formats:
        for stem, df in report.tables.items():
            written.append(
                _write(
                    out / f"{stem}.csv",
                    lambda p, df=df: df.to_csv(p, index=False, float_format=f"%.{CSV_DIGITS}g"),
                )
            )
    if "json" in formats:
        text = report_json(report)
        written.append(_write(out / f"{report.name}.json", lambda p: p.write_text(text, encoding="utf-8")))
    if "svg" in formats:
        for stem, fig in report.figures.items():
            written.append(_write(out / f"{stem}.svg", lambda p, fig=fig: fig.write_image(str(p), format="svg")))
    if "html" in formats:
        for stem, fig in report.figures.items():
            written.append(
                _write(out / f"{stem}.html", lambda p, fig=fig: fig.write_html(str(p), include_plotlyjs="cdn"))
            )

    logger.info("Wrote %d file(s) to %s", len(written), out)
    return written
