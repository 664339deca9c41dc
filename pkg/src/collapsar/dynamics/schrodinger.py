"""Crank-Nicolson reference solver for i hbar psi_t = -(hbar^2/2m) psi'' + V psi.

Used as the oracle the CQHJ stepping is checked against. The Laplacian is the
five-point fourth-order stencil, so one implicit step is a pentadiagonal
banded solve. The two outermost nodes at each edge carry Dirichlet data: each
edge rotates with the Crank-Nicolson phase of the local energy
(H psi)/psi measured at t=0 next to it. Zero edge data gives the reflecting
box; a discrete plane wave stays an exact solution.
"""

from __future__ import annotations

import logging

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from collapsar.core.constants import CLAMPED_EDGE_NODES, NODE_FLOOR
from collapsar.core.errors import LinearSolveFailure, NonFiniteError
from collapsar.core.types import FieldKind, FieldSeries, ComplexField, PhysicalConstants
from collapsar.dynamics.config import EvolutionConfig
from collapsar.field.stencils import central_second_derivative

logger = logging.getLogger(__name__)

# Five-point Laplacian weights at offsets -2..+2 (denominator 12 dx^2)
_LAPLACIAN = (-1.0, 16.0, -30.0, 16.0, -1.0)


class _Hamiltonian:
    """H = -(hbar^2/2m) d2/dx2 + V restricted to the interior rows."""

    def __init__(self, dx: float, V: np.ndarray, c: PhysicalConstants) -> None:
        self.dx = dx
        self.V = V
        self.kinetic = c.hbar**2 / (2.0 * c.mass)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        e = CLAMPED_EDGE_NODES
        return -self.kinetic * central_second_derivative(psi, self.dx) + self.V[e:-e] * psi[e:-e]

    def banded_lhs(self, n: int, h: float, hbar: float) -> np.ndarray:
        """(I + i h H / 2 hbar) in solve_banded's (2, 2) layout, identity on edge rows."""
        e = CLAMPED_EDGE_NODES
        ab = np.zeros((5, n), dtype=complex)
        ab[2, :] = 1.0
        half = 0.5j * h / hbar
        rows = np.arange(e, n - e)
        for offset, w in zip(range(-2, 3), _LAPLACIAN):
            # A[i, i+offset] lives at ab[2 - offset, i + offset]
            ab[2 - offset, rows + offset] += -half * self.kinetic * w / (12.0 * self.dx**2)
        ab[2, rows] += half * self.V[rows]
        return ab


def _edge_factors(psi: np.ndarray, H: _Hamiltonian, h: float, hbar: float) -> tuple[complex, complex]:
    e = CLAMPED_EDGE_NODES
    H_psi = H.apply(psi)
    floor = NODE_FLOOR * float(np.max(np.abs(psi)))
    factors = []
    for inner, h_inner in ((psi[e], H_psi[0]), (psi[-e - 1], H_psi[-1])):
        energy = (h_inner / inner).real if abs(inner) > floor else 0.0
        a = 0.5j * h * energy / hbar
        factors.append(complex((1.0 - a) / (1.0 + a)))
    return factors[0], factors[1]


def reference_schrodinger(
    psi0: ComplexField,
    cfg: EvolutionConfig,
    c: PhysicalConstants,
) -> FieldSeries:
    """Implicit-midpoint evolution of psi0; snapshots follow cfg.snapshot_stride.

    Unconditionally stable, so no step-size guard applies.
    """
    if not psi0.is_finite():
        raise NonFiniteError("Initial wave function contains non-finite values")
    grid = psi0.grid
    e = CLAMPED_EDGE_NODES
    h = cfg.step
    H = _Hamiltonian(grid.dx, cfg.potential_values(grid), c)
    lhs = H.banded_lhs(grid.n, h, c.hbar)
    left, right = _edge_factors(psi0.values, H, h, c.hbar)

    keep = set(cfg.snapshot_indices())
    times: list[float] = [0.0]
    frames: list[np.ndarray] = [psi0.values.copy()]

    psi = psi0.values.astype(complex)
    for step in range(1, cfg.n_steps + 1):
        rhs = np.empty_like(psi)
        rhs[e:-e] = psi[e:-e] - (0.5j * h / c.hbar) * H.apply(psi)
        rhs[:e] = left * psi[:e]
        rhs[-e:] = right * psi[-e:]
        try:
            psi = solve_banded((2, 2), lhs, rhs, check_finite=False)
        except (LinAlgError, ValueError) as exc:
            raise LinearSolveFailure(f"Crank-Nicolson solve failed at step {step}: {exc}") from exc
        if not np.all(np.isfinite(psi)):
            raise LinearSolveFailure(f"Crank-Nicolson solve gave non-finite values at step {step}")
        if step in keep:
            times.append(step * h)
            frames.append(psi.copy())

    logger.debug("Reference solver: %d steps of %.3g on %d nodes", cfg.n_steps, h, grid.n)
    return FieldSeries(grid, np.array(times), np.array(frames), FieldKind.WAVE_FUNCTION)
