"""CQHJ vs Schroedinger: run both solvers on one initial state and compare p fields.

The reference wave function is turned into a momentum field only on the
window where its density is at least ``window_threshold`` of the snapshot
maximum; outside it psi'/psi is dominated by round-off. The clamped edge
nodes of both solvers are boundary data and never compared.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from collapsar.core.constants import CLAMPED_EDGE_NODES, WINDOW_THRESHOLD
from collapsar.core.errors import ConfigError, DivergedError
from collapsar.core.types import ComplexField, FieldKind, PhysicalConstants, SpatialGrid
from collapsar.dynamics.config import EvolutionConfig
from collapsar.dynamics.cqhj import evolve_free
from collapsar.dynamics.schrodinger import reference_schrodinger
from collapsar.field.transforms import gaussian_packet, plane_wave, psi_to_p

logger = logging.getLogger(__name__)

MIN_WINDOW_NODES = 8


@dataclass(frozen=True, eq=False)
class EquivalenceCase:
    """An initial wave function, optionally with its exact momentum field."""

    label: str
    psi0: ComplexField
    p0: Optional[ComplexField] = None

    def initial_momentum(self, c: PhysicalConstants) -> ComplexField:
        return self.p0 if self.p0 is not None else psi_to_p(self.psi0, c)


def plane_wave_case(grid: SpatialGrid, k: float, c: PhysicalConstants) -> EquivalenceCase:
    p0 = ComplexField(grid, np.full(grid.n, c.hbar * k), FieldKind.MOMENTUM_FIELD)
    return EquivalenceCase(f"plane k={k:g}", plane_wave(grid, k), p0)


def gaussian_case(
    grid: SpatialGrid,
    c: PhysicalConstants,
    sigma0: float = 1.0,
    k0: float = 0.0,
    x0: float = 0.0,
) -> EquivalenceCase:
    """Gaussian packet with its exact p = hbar (k0 + i (x - x0) / sigma0^2)."""
    p = c.hbar * (k0 + 1j * (grid.nodes - x0) / sigma0**2)
    return EquivalenceCase(
        f"gaussian sigma0={sigma0:g} k0={k0:g}",
        gaussian_packet(grid, sigma0=sigma0, k0=k0, x0=x0),
        ComplexField(grid, p, FieldKind.MOMENTUM_FIELD),
    )


@dataclass(frozen=True, eq=False)
class EquivalenceResult:
    label: str
    times: np.ndarray
    snapshot_discrepancy: np.ndarray
    discrepancy: float
    window_nodes: int


@dataclass(frozen=True)
class EquivalenceReport:
    results: tuple[EquivalenceResult, ...]
    window_threshold: float

    @property
    def max_discrepancy(self) -> float:
        return max(r.discrepancy for r in self.results)

    def result(self, label: str) -> EquivalenceResult:
        for r in self.results:
            if r.label == label:
                return r
        raise ConfigError(f"No equivalence case labelled {label!r}")


def _window(psi: np.ndarray, threshold: float) -> tuple[int, int]:
    e = CLAMPED_EDGE_NODES
    density = np.abs(psi) ** 2
    inside = np.flatnonzero(density >= threshold * density.max())
    inside = inside[(inside >= e) & (inside < psi.size - e)]
    if inside.size < MIN_WINDOW_NODES:
        raise ConfigError(
            f"Comparison window holds {inside.size} nodes; at least {MIN_WINDOW_NODES} needed"
        )
    return int(inside[0]), int(inside[-1]) + 1


def compare_case(
    case: EquivalenceCase,
    cfg: EvolutionConfig,
    c: PhysicalConstants,
    window_threshold: float = WINDOW_THRESHOLD,
) -> EquivalenceResult:
    reference = reference_schrodinger(case.psi0, cfg, c)
    try:
        cqhj = evolve_free(case.initial_momentum(c), cfg, c)
    except DivergedError as e:
        logger.warning("Case %r diverged at t=%.6g", case.label, e.t)
        raise e.with_label(case.label) from e

    per_snapshot = np.empty(len(reference))
    worst_diff = worst_ref = 0.0
    for i in range(len(reference)):
        start, stop = _window(reference.values[i], window_threshold)
        p_ref = psi_to_p(reference[i].restrict(start, stop), c).values
        diff = float(np.max(np.abs(cqhj.values[i][start:stop] - p_ref)))
        scale = float(np.max(np.abs(p_ref)))
        per_snapshot[i] = diff / scale if scale > 0 else diff
        worst_diff = max(worst_diff, diff)
        worst_ref = max(worst_ref, scale)

    discrepancy = worst_diff / worst_ref if worst_ref > 0 else worst_diff
    logger.info("Equivalence %r: max relative discrepancy %.3g", case.label, discrepancy)
    return EquivalenceResult(
        label=case.label,
        times=reference.times,
        snapshot_discrepancy=per_snapshot,
        discrepancy=discrepancy,
        window_nodes=stop - start,
    )


def equivalence_sweep(
    cases: Sequence[EquivalenceCase],
    cfg: EvolutionConfig,
    c: PhysicalConstants,
    window_threshold: float = WINDOW_THRESHOLD,
) -> EquivalenceReport:
    """Run every case; a diverging case raises DivergedError carrying its label."""
    if not cases:
        raise ConfigError("equivalence_sweep needs at least one case")
    results = tuple(compare_case(case, cfg, c, window_threshold) for case in cases)
    return EquivalenceReport(results=results, window_threshold=window_threshold)
