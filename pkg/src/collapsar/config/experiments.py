"""Built-in experimental constraints on the collapse time.

Seven experiments that saw no collapse delay down to their shortest probed
time tau_m, each with its characteristic energy time tau_E and the bound
r = tau_m / tau_E as originally tabulated. All figures are order-of-magnitude.
"""

from __future__ import annotations

from collapsar.core.errors import ConfigError
from collapsar.core.types import ExperimentRecord

PHOTON_POLARIZATION = ExperimentRecord("Photon polarization", 7.5e-14, 1e-15, printed_r=1e2)
NEUTRON_INTERFEROMETRY = ExperimentRecord("Neutron interferometry", 2.7e-2, 2.3e-12, printed_r=1e10)
QUANTUM_JUMPS = ExperimentRecord("Quantum jumps", 1.0, 1e-15, printed_r=1e15)
NONLINEARITY_TEST = ExperimentRecord("Nonlinearity test", 1.0, 1e-9, printed_r=1e9)
FEMTOSECOND_OPTICS = ExperimentRecord("Femtosecond optics", 1e-13, 7e-17, printed_r=1e3)
BOSE_EINSTEIN_CONDENSATE = ExperimentRecord("Bose-Einstein condensate", 1e-4, 1.8e-3, printed_r=5e-2)
EPR_CORRELATIONS = ExperimentRecord("EPR correlations", 5e-12, 1e-15, printed_r=5e3)

BUILTIN_RECORDS: tuple[ExperimentRecord, ...] = (
    PHOTON_POLARIZATION,
    NEUTRON_INTERFEROMETRY,
    QUANTUM_JUMPS,
    NONLINEARITY_TEST,
    FEMTOSECOND_OPTICS,
    BOSE_EINSTEIN_CONDENSATE,
    EPR_CORRELATIONS,
)


class ExperimentRegistry:
    """Lookup table for experiment records, seeded with the built-in rows."""

    def __init__(self, records: tuple[ExperimentRecord, ...] = BUILTIN_RECORDS) -> None:
        self._records: dict[str, ExperimentRecord] = {r.name: r for r in records}

    def get(self, name: str) -> ExperimentRecord:
        """Get a record by name (case-insensitive)."""
        for key, record in self._records.items():
            if key.lower() == name.lower():
                return record
        raise ConfigError(f"Unknown experiment: {name}")

    def register(self, record: ExperimentRecord) -> None:
        """Add a row, replacing any row with the same name."""
        self._records[record.name] = record

    def records(self) -> list[ExperimentRecord]:
        return list(self._records.values())

    def __len__(self) -> int:
        return len(self._records)
