"""Grid construction, initial states and the psi <-> p transform.

The momentum field p = (hbar/i) psi'/psi is the single dynamical variable of
the complex quantum Hamilton-Jacobi picture; ``psi_to_p`` and ``p_to_psi``
move between the two descriptions.
"""

from __future__ import annotations

import math

import numpy as np

from collapsar.core.constants import NODE_FLOOR
from collapsar.core.errors import (
    GridNodeOnNodeError,
    NodeTooSmallError,
    NonFiniteError,
    ZeroFieldError,
)
from collapsar.core.types import (
    ComplexField,
    FieldKind,
    InitialState,
    PhysicalConstants,
    SpatialGrid,
)
from collapsar.field.stencils import cumulative_trapezoid, first_derivative, trapezoid


def canonical_grid(state: InitialState, n: int) -> SpatialGrid:
    """Grid on (-pi/2k + 2dx, pi/2k - 2dx), the node-free cell of cos(kx).

    dx is chosen so the n nodes keep uniform spacing after the inward shift.
    """
    half = math.pi / (2.0 * state.k)
    dx = 2.0 * half / (n + 3)
    return SpatialGrid(-half + 2.0 * dx, half - 2.0 * dx, n)


def make_symmetric_psi(grid: SpatialGrid, state: InitialState) -> ComplexField:
    """(e^{ikx} + e^{-ikx})/sqrt(2) = sqrt(2) cos(kx) on the grid."""
    x = grid.nodes
    period = math.pi / state.k
    offset = np.mod(x - 0.5 * period, period)
    distance = np.minimum(offset, period - offset)
    close = np.flatnonzero(distance < 0.5 * grid.dx)
    if close.size:
        j = int(close[0])
        raise GridNodeOnNodeError(j, float(x[j]))
    return ComplexField(grid, math.sqrt(2.0) * np.cos(state.k * x), FieldKind.WAVE_FUNCTION)


def plane_wave(grid: SpatialGrid, k: float, amplitude: complex = 1.0) -> ComplexField:
    return ComplexField(grid, amplitude * np.exp(1j * k * grid.nodes), FieldKind.WAVE_FUNCTION)


def gaussian_packet(
    grid: SpatialGrid,
    sigma0: float = 1.0,
    k0: float = 0.0,
    x0: float = 0.0,
) -> ComplexField:
    """exp(-(x-x0)^2 / (2 sigma0^2) + i k0 x), normalized to unit mean square."""
    x = grid.nodes
    psi = np.exp(-((x - x0) ** 2) / (2.0 * sigma0**2) + 1j * k0 * x)
    return normalize_mean_square(ComplexField(grid, psi, FieldKind.WAVE_FUNCTION))


def psi_to_p(
    psi: ComplexField,
    c: PhysicalConstants,
    node_floor: float = NODE_FLOOR,
) -> ComplexField:
    """p_j = (hbar/i) psi'(x_j)/psi(x_j)."""
    values = psi.values
    modulus = np.abs(values)
    small = np.flatnonzero(~(modulus > node_floor))
    if small.size:
        j = int(small[0])
        raise NodeTooSmallError(j, float(modulus[j]), node_floor)
    dpsi = first_derivative(values, psi.grid.dx)
    p = -1j * c.hbar * dpsi / values
    return ComplexField(psi.grid, p, FieldKind.MOMENTUM_FIELD)


def p_to_psi(
    p: ComplexField,
    c: PhysicalConstants,
    anchor_value: complex = 1.0,
) -> ComplexField:
    """psi(x_j) = anchor * exp((i/hbar) * integral_{x_0}^{x_j} p dx)."""
    if not p.is_finite():
        raise NonFiniteError("Momentum field has non-finite values")
    phase = cumulative_trapezoid(p.values, p.grid.dx)
    psi = anchor_value * np.exp(1j * phase / c.hbar)
    return ComplexField(p.grid, psi, FieldKind.WAVE_FUNCTION)


def normalize_mean_square(psi: ComplexField) -> ComplexField:
    """Rescale so (1/L) * integral |psi|^2 dx = 1; the global phase is kept."""
    density = np.abs(psi.values) ** 2
    mean_square = float(trapezoid(density, psi.grid.dx)) / psi.grid.length
    if not mean_square > 0 or not math.isfinite(mean_square):
        raise ZeroFieldError(f"Cannot normalize a field with mean square {mean_square}")
    return psi.with_values(psi.values / math.sqrt(mean_square))


def symmetric_momentum(grid: SpatialGrid, state: InitialState, c: PhysicalConstants) -> ComplexField:
    """p0(x) = epsilon + i q tan(kx), the momentum field of the (perturbed) symmetric state."""
    p = state.epsilon + 1j * state.q(c) * np.tan(state.k * grid.nodes)
    return ComplexField(grid, p, FieldKind.MOMENTUM_FIELD)
