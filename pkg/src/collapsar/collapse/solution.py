"""Closed-form solution of dp/dt = g p (q^2 - p^2) and the matching wave function.

With B = exp(g q^2 t) the solution reads

    p(t) = q p0 / sqrt(z),   z = p0^2 (1 - B^-2) + q^2 B^-2,

which is the familiar q p0 B / sqrt(p0^2 (B^2 - 1) + q^2) divided through by
B so nothing overflows. z moves along the straight segment from q^2 (t = 0)
towards p0^2 (t -> inf); it can only reach the negative real axis when p0
is purely imaginary, and then only through z = 0, the pole. Away from that
case the principal root is the continuous sheet for all t.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from collapsar.collapse.force import b_factor
from collapsar.core.constants import (
    BISECTION_MAX_ITER,
    BISECTION_REL_TOL,
    COLLAPSE_SCAN_POINTS,
    LOG_OVERFLOW,
    NORMALIZATION_NODES,
)
from collapsar.core.errors import ConfigError, NeverConvergesError, SingularityError
from collapsar.core.types import (
    CollapseParams,
    ComplexField,
    FieldKind,
    InitialState,
    Outcome,
    PhysicalConstants,
    SpatialGrid,
)
from collapsar.field.stencils import trapezoid
from collapsar.field.transforms import symmetric_momentum

logger = logging.getLogger(__name__)


def _check_sheet(sheet: int) -> None:
    if sheet not in (1, -1):
        raise ConfigError(f"sheet must be +1 or -1, got {sheet}")


def pole_time(p0: complex, params: CollapseParams) -> Optional[float]:
    """t* = ln(1 + q^2/|p0|^2) / (2 g q^2) for purely imaginary p0, else None."""
    p0 = complex(p0)
    if p0.real != 0.0 or p0.imag == 0.0:
        return None
    return math.log1p(params.q**2 / abs(p0) ** 2) / (2.0 * params.rate)


def evaluate_closed_form(
    p0: np.ndarray,
    t: float,
    params: CollapseParams,
    sheet: int,
) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized p(t) and branch sign; the sheet picks the continuation past a pole."""
    inv2 = b_factor(t, params).inverse_square
    q = params.q
    z = p0 * p0 * (1.0 - inv2) + q * q * inv2
    hit = (z == 0) & (p0 != 0)
    if np.any(hit):
        raise SingularityError(t)
    with np.errstate(divide="ignore", invalid="ignore"):
        p = np.where(p0 == 0, 0.0 + 0.0j, q * p0 / np.sqrt(z))
    branch = np.ones(p0.shape, dtype=int)
    past = (p0.real == 0) & (p0.imag != 0) & (z.real < 0)
    if np.any(past):
        principal = p[past]
        continued = sheet * np.abs(principal)
        branch[past] = np.where(np.sign(principal.real) == np.sign(continued.real), 1, -1)
        p[past] = continued
    return p, branch


def analytic_p(p0: complex, t: float, params: CollapseParams) -> tuple[complex, int]:
    """Closed-form p(t) and its branch sign (+1 on the sheet that starts at p0).

    Raises SingularityError at and beyond the pole of a purely imaginary p0:
    the exactly symmetric trajectory does not select a continuation.
    """
    if t < 0:
        raise ConfigError(f"t must be non-negative, got {t}")
    t_star = pole_time(p0, params)
    if t_star is not None and t >= t_star:
        raise SingularityError(t_star)
    p, branch = evaluate_closed_form(np.array([complex(p0)]), t, params, sheet=1)
    return complex(p[0]), int(branch[0])


def classify_outcome(p0: complex) -> Outcome:
    """Sign of Re p0 decides the outcome; exactly zero means undetermined."""
    re = complex(p0).real
    if re > 0:
        return Outcome.PLUS
    if re < 0:
        return Outcome.MINUS
    return Outcome.UNDETERMINED


@dataclass(frozen=True)
class CollapseTiming:
    """Measured collapse time next to the nominal 1/(g q^2)."""

    measured: float
    nominal: float
    delta: float

    @property
    def ratio(self) -> float:
        return self.measured / self.nominal


def _distance(p0: complex, t: float, params: CollapseParams) -> float:
    p, _ = analytic_p(p0, t, params)
    return abs(1.0 - abs(p.real) / params.q)


def collapse_time(p0: complex, params: CollapseParams, delta: float) -> CollapseTiming:
    """Smallest t with |1 - |Re p(t)|/q| < delta, by scan and bisection on the closed form."""
    if not 0 < delta < 1:
        raise ConfigError(f"delta must lie in (0, 1), got {delta}")
    if classify_outcome(p0) is Outcome.UNDETERMINED:
        raise NeverConvergesError(
            f"Re p0 is exactly zero (p0={complex(p0)}); the trajectory never selects an outcome"
        )
    nominal = params.tau_c_nominal

    def converged(t: float) -> bool:
        return _distance(p0, t, params) < delta

    if converged(0.0):
        return CollapseTiming(0.0, nominal, delta)

    # B^-2 underflows to zero past this time, where p equals +-q exactly
    t_limit = LOG_OVERFLOW / params.rate
    hi = nominal
    while not converged(hi):
        if hi > t_limit:
            raise NeverConvergesError(f"No convergence to delta={delta} before t={hi:.6g}")
        hi *= 2.0

    samples = np.linspace(0.0, hi, COLLAPSE_SCAN_POINTS + 1)
    lo = 0.0
    for t in samples[1:]:
        if converged(float(t)):
            hi = float(t)
            break
        lo = float(t)

    for _ in range(BISECTION_MAX_ITER):
        if hi - lo <= BISECTION_REL_TOL * hi:
            break
        mid = 0.5 * (lo + hi)
        if converged(mid):
            hi = mid
        else:
            lo = mid

    logger.debug("Collapse time for p0=%s: %.9g (nominal %.9g)", p0, hi, nominal)
    return CollapseTiming(hi, nominal, delta)


def _default_sheet(state: InitialState, sheet: Optional[int]) -> int:
    """An epsilon-perturbed state carries its own sheet; the symmetric one needs it supplied."""
    if state.epsilon != 0.0:
        return 1 if state.epsilon > 0 else -1
    return 1 if sheet is None else sheet


def momentum_field(
    grid: SpatialGrid,
    t: float,
    state: InitialState,
    params: CollapseParams,
    c: PhysicalConstants,
    sheet: Optional[int] = None,
) -> ComplexField:
    """Closed-form p(x, t) on a grid starting from p0 = epsilon + i q tan(kx).

    For the exactly symmetric state, nodes already past their pole are
    continued on the requested sheet (+1 -> p = +q, -1 -> p = -q asymptotically).
    """
    if sheet is not None:
        _check_sheet(sheet)
    p0 = symmetric_momentum(grid, state, c).values
    p, _ = evaluate_closed_form(p0, t, params, _default_sheet(state, sheet))
    return ComplexField(grid, p, FieldKind.MOMENTUM_FIELD)


def _bracket(x: np.ndarray, t: float, state: InitialState, params: CollapseParams, sheet: int) -> np.ndarray:
    """[B cos kx + sqrt(1 - B^2 sin^2 kx)] / (B + 1), evaluated through B^-1."""
    b = b_factor(t, params)
    inv = b.inverse
    s = np.sin(state.k * x)
    radicand = inv * inv - s * s
    # past the per-node branch point B|sin kx| > 1 the root is imaginary;
    # its sign follows sin kx so psi tends to exp(i sheet k x)
    root = np.where(
        radicand >= 0,
        np.sqrt(np.abs(radicand)) + 0j,
        1j * sheet * np.sign(s) * np.sqrt(np.abs(radicand)),
    )
    return (np.cos(state.k * x) + root) / (1.0 + inv)


def _normalization(t: float, state: InitialState, params: CollapseParams, sheet: int) -> float:
    """N(t) giving mean square one over the canonical cell (-pi/2k, pi/2k)."""
    half = math.pi / (2.0 * state.k)
    x = np.linspace(-half, half, NORMALIZATION_NODES)
    dx = x[1] - x[0]
    density = np.abs(_bracket(x, t, state, params, sheet)) ** 2
    mean_square = float(trapezoid(density, dx)) / (2.0 * half)
    return 1.0 / math.sqrt(mean_square)


def analytic_psi_field(
    grid: SpatialGrid,
    t: float,
    state: InitialState,
    params: CollapseParams,
    c: PhysicalConstants,
    sheet: Optional[int] = None,
) -> ComplexField:
    """psi(x, t) = N(t) [B cos kx + sqrt(1 - B^2 sin^2 kx)] / (B + 1) on a grid."""
    if t < 0:
        raise ConfigError(f"t must be non-negative, got {t}")
    if sheet is not None:
        _check_sheet(sheet)
    chosen = _default_sheet(state, sheet)
    values = _normalization(t, state, params, chosen) * _bracket(grid.nodes, t, state, params, chosen)
    return ComplexField(grid, values, FieldKind.WAVE_FUNCTION)


def analytic_psi(
    x: float,
    t: float,
    state: InitialState,
    params: CollapseParams,
    c: PhysicalConstants,
    sheet: Optional[int] = None,
) -> complex:
    """Single-point form of analytic_psi_field."""
    half = math.pi / (2.0 * state.k)
    if not -half <= x <= half:
        raise ConfigError(f"x={x} lies outside the canonical cell [-{half:.6g}, {half:.6g}]")
    if t < 0:
        raise ConfigError(f"t must be non-negative, got {t}")
    if sheet is not None:
        _check_sheet(sheet)
    chosen = _default_sheet(state, sheet)
    value = _bracket(np.array([x]), t, state, params, chosen)[0]
    return complex(_normalization(t, state, params, chosen) * value)
