"""CSV loader for experiment records (extra rows for the constraints table)."""

from __future__ import annotations

import math
from pathlib import Path
from typing import Optional

import pandas as pd

from collapsar.core.errors import CollapsarError, DataError
from collapsar.core.types import ExperimentRecord

REQUIRED_COLUMNS = ("name", "tau_m_s", "tau_E_s")


class RecordLoader:
    """Load ExperimentRecords from a CSV file.

    Required columns: name, tau_m_s, tau_E_s. Optional: reference, printed_r.
    The column names match what the constraints CSV output writes, so a
    written table can be edited and loaded back.
    """

    def __init__(self, encoding: str = "utf-8") -> None:
        self._encoding = encoding

    def load(self, file_path: str | Path) -> list[ExperimentRecord]:
        path = Path(file_path)
        if not path.exists():
            raise DataError(f"File not found: {path}")

        try:
            df = pd.read_csv(path, encoding=self._encoding, comment="#", skipinitialspace=True)
        except Exception as e:
            raise DataError(f"Failed to read CSV {path}: {e}") from e

        missing = [c for c in REQUIRED_COLUMNS if c not in df.columns]
        if missing:
            raise DataError(f"{path}: missing column(s) {', '.join(missing)}")

        return [self._to_record(path, i, row) for i, row in df.iterrows()]

    @staticmethod
    def _to_record(path: Path, index: object, row: pd.Series) -> ExperimentRecord:
        try:
            return ExperimentRecord(
                name=str(row["name"]).strip(),
                tau_m=float(row["tau_m_s"]),
                tau_E=float(row["tau_E_s"]),
                reference=_optional_text(row.get("reference")),
                printed_r=_optional_float(row.get("printed_r")),
            )
        except (ValueError, TypeError, CollapsarError) as e:
            raise DataError(f"{path}: bad record in row {index}: {e}") from e


def _optional_text(val: object) -> str:
    if val is None or (isinstance(val, float) and math.isnan(val)):
        return ""
    return str(val).strip()


def _optional_float(val: object) -> Optional[float]:
    if val is None:
        return None
    out = float(val)
    return None if math.isnan(out) else out
