"""Core value types shared across all modules.

Dataclasses are frozen: grids, fields, parameters and trajectories are
immutable values once built, so they can be shared between threads and
worker processes freely. Array payloads are marked read-only.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Optional

import numpy as np

from collapsar.core.errors import ConfigError


def _readonly(values: np.ndarray) -> np.ndarray:
    arr = np.array(values, copy=True)
    arr.flags.writeable = False
    return arr


class FieldKind(Enum):
    WAVE_FUNCTION = "wave_function"
    MOMENTUM_FIELD = "momentum_field"
    POTENTIAL_FIELD = "potential_field"


class Outcome(Enum):
    PLUS = "plus"
    MINUS = "minus"
    UNDETERMINED = "undetermined"

    @property
    def sign(self) -> int:
        return {Outcome.PLUS: 1, Outcome.MINUS: -1}.get(self, 0)


class EventKind(Enum):
    SINGULARITY_DETECTED = "singularity_detected"
    BRANCH_FLIP = "branch_flip"
    CONVERGED = "converged"


@dataclass(frozen=True)
class PhysicalConstants:
    """hbar and particle mass; natural units by default."""

    hbar: float = 1.0
    mass: float = 1.0

    def __post_init__(self) -> None:
        if not (self.hbar > 0 and self.mass > 0):
            raise ConfigError(
                f"hbar and mass must be positive (hbar={self.hbar}, mass={self.mass})"
            )


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform 1D grid x_j = x_min + j*dx, j = 0..n-1."""

    x_min: float
    x_max: float
    n: int

    def __post_init__(self) -> None:
        if self.n < 8:
            raise ConfigError(f"Grid needs at least 8 nodes, got n={self.n}")
        if not self.x_max > self.x_min:
            raise ConfigError(
                f"x_max must exceed x_min (x_min={self.x_min}, x_max={self.x_max})"
            )

    @property
    def dx(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def length(self) -> float:
        return self.x_max - self.x_min

    @property
    def nodes(self) -> np.ndarray:
        return self.x_min + self.dx * np.arange(self.n)

    def sub_grid(self, start: int, stop: int) -> SpatialGrid:
        """Grid over nodes start..stop-1 (same spacing)."""
        x = self.nodes
        return SpatialGrid(float(x[start]), float(x[stop - 1]), stop - start)


@dataclass(frozen=True, eq=False)
class ComplexField:
    """Complex values sampled on a SpatialGrid."""

    grid: SpatialGrid
    values: np.ndarray
    kind: FieldKind

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=complex)
        if values.shape != (self.grid.n,):
            raise ConfigError(
                f"Field has {values.shape} values for a grid of {self.grid.n} nodes"
            )
        object.__setattr__(self, "values", _readonly(values))

    @property
    def x(self) -> np.ndarray:
        return self.grid.nodes

    def with_values(self, values: np.ndarray, kind: Optional[FieldKind] = None) -> ComplexField:
        return ComplexField(self.grid, values, kind or self.kind)

    def restrict(self, start: int, stop: int) -> ComplexField:
        """Sub-field on the contiguous node window start..stop-1."""
        return ComplexField(
            self.grid.sub_grid(start, stop), self.values[start:stop], self.kind
        )

    def is_finite(self) -> bool:
        return bool(np.all(np.isfinite(self.values)))


@dataclass(frozen=True)
class InitialState:
    """Symmetric two-plane-wave state with a real momentum perturbation epsilon."""

    k: float
    epsilon: float = 0.0

    def __post_init__(self) -> None:
        if not self.k > 0:
            raise ConfigError(f"Wavenumber k must be positive, got {self.k}")

    def q(self, constants: PhysicalConstants) -> float:
        """Measured momentum magnitude hbar*k."""
        return constants.hbar * self.k

    def p0(self, x: float, constants: PhysicalConstants) -> complex:
        """Initial momentum epsilon + i q tan(kx) at position x."""
        return complex(self.epsilon, self.q(constants) * math.tan(self.k * x))


@dataclass(frozen=True)
class CollapseParams:
    """Coupling g and target momentum q of the collapsing force g p (q^2 - p^2).

    g must be real: a complex coupling would make the dynamics reversible.
    """

    g: float
    q: float

    def __post_init__(self) -> None:
        if isinstance(self.g, complex):
            if self.g.imag != 0.0:
                raise ConfigError(f"Coupling g must be real, got {self.g}")
            object.__setattr__(self, "g", self.g.real)
        if not self.g > 0:
            raise ConfigError(f"Coupling g must be positive, got {self.g}")
        if not self.q > 0:
            raise ConfigError(f"Target momentum q must be positive, got {self.q}")

    @property
    def rate(self) -> float:
        """g q^2, the linear growth rate of the instability at p = 0."""
        return self.g * self.q * self.q

    @property
    def tau_c_nominal(self) -> float:
        return 1.0 / self.rate

    @classmethod
    def from_taylor(cls, c1: float, c3: float) -> CollapseParams:
        """Build from the odd cubic force c1 p + c3 p^3.

        The outcomes p = +-q are fixed points only if c1 = -c3 q^2, which
        needs c3 < 0 < c1.
        """
        if not (c3 < 0 < c1):
            raise ConfigError(
                f"Force c1 p + c3 p^3 has no stable pair +-q (c1={c1}, c3={c3})"
            )
        return cls(g=-c3, q=math.sqrt(-c1 / c3))


@dataclass(frozen=True)
class TrajectoryEvent:
    kind: EventKind
    t: float


@dataclass(frozen=True, eq=False)
class CollapseTrajectory:
    """Time-ordered record of one pointwise p(t) evolution."""

    times: np.ndarray
    p_values: np.ndarray
    branch_sign: np.ndarray
    events: tuple[TrajectoryEvent, ...] = ()
    params: Optional[CollapseParams] = None
    convergence_delta: float = 0.0
    singularity_threshold: float = 0.0

    def __post_init__(self) -> None:
        times = np.asarray(self.times, dtype=float)
        if times.size > 1 and not np.all(np.diff(times) > 0):
            raise ConfigError("Trajectory times must be strictly increasing")
        object.__setattr__(self, "times", _readonly(times))
        object.__setattr__(self, "p_values", _readonly(np.asarray(self.p_values, dtype=complex)))
        object.__setattr__(self, "branch_sign", _readonly(np.asarray(self.branch_sign, dtype=int)))

    def __len__(self) -> int:
        return int(self.times.size)

    @property
    def final_p(self) -> complex:
        return complex(self.p_values[-1])

    def first_event(self, kind: EventKind) -> Optional[TrajectoryEvent]:
        return next((e for e in self.events if e.kind == kind), None)

    def event_at(self, t: float) -> str:
        """Comma-joined event names recorded at sample time t."""
        return ",".join(e.kind.value for e in self.events if e.t == t)


@dataclass(frozen=True)
class ExperimentRecord:
    """One row of the experimental constraints table.

    tau_m: shortest time scale probed (s); tau_E: characteristic energy time (s).
    """

    name: str
    tau_m: float
    tau_E: float
    reference: str = ""
    printed_r: Optional[float] = None

    def __post_init__(self) -> None:
        if not (self.tau_m > 0 and self.tau_E > 0):
            raise ConfigError(
                f"{self.name}: tau_m and tau_E must be positive "
                f"(tau_m={self.tau_m}, tau_E={self.tau_E})"
            )

    @property
    def r(self) -> float:
        return self.tau_m / self.tau_E

    @property
    def kappa_bound(self) -> float:
        """Upper bound on kappa = tau_c / tau_E."""
        return self.r

    def within_factor(self, factor: float) -> Optional[bool]:
        """Does r reproduce the printed value within a multiplicative factor?"""
        if self.printed_r is None:
            return None
        ratio = self.r / self.printed_r
        return 1.0 / factor <= ratio <= factor


@dataclass(frozen=True)
class FieldSeries:
    """Snapshots of a field evolution: times[i] pairs with values[i]."""

    grid: SpatialGrid
    times: np.ndarray
    values: np.ndarray
    kind: FieldKind
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "times", _readonly(np.asarray(self.times, dtype=float)))
        object.__setattr__(self, "values", _readonly(np.asarray(self.values, dtype=complex)))

    def __len__(self) -> int:
        return int(self.times.size)

    def __getitem__(self, i: int) -> ComplexField:
        return ComplexField(self.grid, self.values[i], self.kind)

    @property
    def final(self) -> ComplexField:
        return self[len(self) - 1]
