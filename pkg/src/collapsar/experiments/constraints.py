"""Experimental constraints on the collapse time, with the text report."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from collapsar.config.experiments import BUILTIN_RECORDS
from collapsar.core.errors import ConfigError
from collapsar.core.types import ExperimentRecord

DEFAULT_FACTOR = 3.0


@dataclass(frozen=True)
class ConstraintReport:
    """Rows plus the most constraining absolute (min tau_m) and relative (min r) bounds."""

    rows: tuple[ExperimentRecord, ...]
    most_constraining_absolute: str
    most_constraining_relative: str
    factor: float = DEFAULT_FACTOR

    def row(self, name: str) -> ExperimentRecord:
        for r in self.rows:
            if r.name == name:
                return r
        raise ConfigError(f"No row named {name!r}")

    @property
    def all_within_factor(self) -> bool:
        """True unless some row with a printed r misses it by more than the factor."""
        return all(r.within_factor(self.factor) is not False for r in self.rows)


def constraints_table(
    records: Optional[Sequence[ExperimentRecord]] = None,
    factor: float = DEFAULT_FACTOR,
) -> ConstraintReport:
    """Bounds tau_c <~ tau_m and kappa <~ r per row; the built-in rows by default."""
    rows = tuple(BUILTIN_RECORDS if records is None else records)
    if not rows:
        raise ConfigError("constraints_table needs at least one record")
    if not factor > 1:
        raise ConfigError(f"factor must exceed 1, got {factor}")
    absolute = min(rows, key=lambda r: r.tau_m)
    relative = min(rows, key=lambda r: r.r)
    return ConstraintReport(
        rows=rows,
        most_constraining_absolute=absolute.name,
        most_constraining_relative=relative.name,
        factor=factor,
    )


def format_constraints(report: ConstraintReport) -> str:
    """Format the constraints as a readable text table."""
    width = 86
    lines = [
        "=" * width,
        "        EXPERIMENTAL CONSTRAINTS ON THE COLLAPSE TIME",
        "=" * width,
        f"  {'Experiment':<26}{'tau_m (s)':>11}{'tau_E (s)':>11}{'r':>11}{'printed':>11}  flags",
        "-" * width,
    ]
    for r in report.rows:
        printed = f"{r.printed_r:>11.1e}" if r.printed_r is not None else f"{'-':>11}"
        flags = []
        if r.name == report.most_constraining_absolute:
            flags.append("abs")
        if r.name == report.most_constraining_relative:
            flags.append("rel")
        if r.within_factor(report.factor) is False:
            flags.append(f"off>{report.factor:g}x")
        lines.append(
            f"  {r.name:<26}{r.tau_m:>11.2e}{r.tau_E:>11.2e}{r.r:>11.2e}{printed}  {','.join(flags)}"
        )
    lines += [
        "-" * width,
        "  Absolute upper bound: tau_c <~ tau_m.  Relative upper bound: tau_c/tau_E <~ r.",
        f"  Most constraining (absolute): {report.most_constraining_absolute}",
        f"  Most constraining (relative): {report.most_constraining_relative}",
        "  All figures are order-of-magnitude estimates.",
        "=" * width,
    ]
    return "\n".join(lines)
