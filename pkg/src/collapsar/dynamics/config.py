"""Time-stepping configuration shared by the CQHJ and reference solvers."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional

import numpy as np

from collapsar.core.constants import BLOWUP_FACTOR, CFL_SAFETY
from collapsar.core.errors import ConfigError
from collapsar.core.types import ComplexField, FieldKind, PhysicalConstants, SpatialGrid


class EvolutionScheme(Enum):
    """Solver used by evolve_free: explicit CQHJ stepping or the reference Schroedinger solver."""

    METHOD_OF_LINES_RK4 = "mol_rk4"
    REFERENCE = "reference"


@dataclass(frozen=True, eq=False)
class EvolutionConfig:
    """dt, t_max and the external potential V (real, default zero).

    ``snapshot_stride`` is the number of steps between stored snapshots; the
    initial and final states are always stored.
    """

    dt: float
    t_max: float
    scheme: EvolutionScheme = EvolutionScheme.METHOD_OF_LINES_RK4
    potential: Optional[ComplexField] = None
    snapshot_stride: int = 1
    safety: float = CFL_SAFETY
    blowup_factor: float = BLOWUP_FACTOR

    def __post_init__(self) -> None:
        if not self.dt > 0:
            raise ConfigError(f"dt must be positive, got {self.dt}")
        if not self.t_max >= 0:
            raise ConfigError(f"t_max must be non-negative, got {self.t_max}")
        if self.snapshot_stride < 1:
            raise ConfigError(f"snapshot_stride must be >= 1, got {self.snapshot_stride}")
        if self.potential is not None:
            if self.potential.kind != FieldKind.POTENTIAL_FIELD:
                raise ConfigError("potential must be a PotentialField")
            if np.any(self.potential.values.imag != 0.0):
                raise ConfigError("External potential must be real")

    @property
    def n_steps(self) -> int:
        if self.t_max == 0:
            return 0
        return max(1, math.ceil(self.t_max / self.dt - 1e-9))

    @property
    def step(self) -> float:
        """Step actually taken: t_max split into n_steps equal pieces (<= dt)."""
        return self.t_max / self.n_steps if self.n_steps else self.dt

    def potential_values(self, grid: SpatialGrid) -> np.ndarray:
        if self.potential is None:
            return np.zeros(grid.n)
        if self.potential.grid != grid:
            raise ConfigError("Potential is sampled on a different grid than the field")
        return self.potential.values.real

    def check_cfl(self, grid: SpatialGrid, c: PhysicalConstants) -> None:
        limit = self.safety * grid.dx**2 * c.mass / c.hbar
        if self.step > limit * (1.0 + 1e-9):
            raise ConfigError(
                f"dt={self.step:.3g} violates the explicit stability guard "
                f"dt <= {self.safety} * dx^2 * m / hbar = {limit:.3g}"
            )

    def snapshot_indices(self) -> list[int]:
        idx = list(range(0, self.n_steps + 1, self.snapshot_stride))
        if idx[-1] != self.n_steps:
            idx.append(self.n_steps)
        return idx


def zero_potential(grid: SpatialGrid) -> ComplexField:
    return ComplexField(grid, np.zeros(grid.n), FieldKind.POTENTIAL_FIELD)
