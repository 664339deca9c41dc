"""Adaptive RK4 integration of the pointwise collapse equation dp/dt = g p (q^2 - p^2).

Each step is taken once with h and twice with h/2; the difference estimates
the local error, and the Richardson combination of the two is kept. The
trajectory is sampled on the regular grid t_n = n*dt (the last sample lands
exactly on t_max); substeps in between are internal.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from collapsar.collapse.force import collapsing_force
from collapsar.collapse.solution import evaluate_closed_form
from collapsar.core.constants import (
    CONVERGENCE_DELTA,
    LOCAL_ERROR_TOL,
    MIN_SUBSTEP_FRACTION,
    SINGULARITY_FACTOR,
)
from collapsar.core.errors import ConfigError, SingularityError
from collapsar.core.types import (
    CollapseParams,
    CollapseTrajectory,
    EventKind,
    TrajectoryEvent,
)

logger = logging.getLogger(__name__)


def _rk4(p: complex, h: float, params: CollapseParams) -> complex:
    k1 = collapsing_force(p, params)
    k2 = collapsing_force(p + 0.5 * h * k1, params)
    k3 = collapsing_force(p + 0.5 * h * k2, params)
    k4 = collapsing_force(p + h * k3, params)
    return p + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _branch_sign(p0: complex, p: complex, t: float, params: CollapseParams) -> int:
    """Sheet of the closed form the numerical value sits on."""
    try:
        ref, _ = evaluate_closed_form(np.array([p0]), t, params, sheet=1)
    except SingularityError:
        return 1
    ref_p = complex(ref[0])
    return 1 if abs(p - ref_p) <= abs(p + ref_p) else -1


class _AdaptiveStepper:
    """Step-doubling controller carrying the current trial step between calls."""

    def __init__(self, params: CollapseParams, h0: float, tol: float) -> None:
        self.params = params
        self.h = h0
        self.tol = tol
        self.h_min = MIN_SUBSTEP_FRACTION * h0
        self.rejected = 0

    def advance(self, p: complex, span: float) -> tuple[complex, float]:
        """One accepted substep no longer than span; returns (p_new, h_taken)."""
        while True:
            h = min(self.h, span)
            full = _rk4(p, h, self.params)
            half = _rk4(_rk4(p, 0.5 * h, self.params), 0.5 * h, self.params)
            scale = max(abs(half), abs(p))
            err = abs(half - full) / scale if scale > 0 else 0.0
            if not math.isfinite(err):
                err = math.inf
            if err <= self.tol or h <= self.h_min:
                if err > self.tol:
                    logger.debug("Accepting substep at the floor h=%.3g (err=%.3g)", h, err)
                grow = 2.0 if err == 0 else min(2.0, 0.9 * (self.tol / err) ** 0.2)
                self.h = max(h * grow, self.h_min)
                return half + (half - full) / 15.0, h
            self.rejected += 1
            self.h = max(0.5 * h, self.h_min)


def evolve_collapse_pointwise(
    p0: complex,
    params: CollapseParams,
    dt: float,
    t_max: float,
    convergence_delta: float = CONVERGENCE_DELTA,
    singularity_factor: float = SINGULARITY_FACTOR,
    tol: float = LOCAL_ERROR_TOL,
) -> CollapseTrajectory:
    """Integrate one trajectory; convergence and singularities are recorded as events."""
    if not dt > 0:
        raise ConfigError(f"dt must be positive, got {dt}")
    if not t_max >= 0:
        raise ConfigError(f"t_max must be non-negative, got {t_max}")
    if not 0 < convergence_delta < 1:
        raise ConfigError(f"convergence_delta must lie in (0, 1), got {convergence_delta}")

    p0 = complex(p0)
    q = params.q
    threshold = singularity_factor * q
    n_samples = 0 if t_max == 0 else max(1, math.ceil(t_max / dt - 1e-9))
    grid = [min(i * dt, t_max) for i in range(n_samples)] + [t_max] if n_samples else [0.0]

    def is_converged(p: complex) -> bool:
        return abs(1.0 - abs(p.real) / q) < convergence_delta

    times = [0.0]
    values = [p0]
    signs = [1]
    events: list[TrajectoryEvent] = []
    if is_converged(p0):
        events.append(TrajectoryEvent(EventKind.CONVERGED, 0.0))

    stepper = _AdaptiveStepper(params, dt, tol)
    p = p0
    t = 0.0
    converged = bool(events)
    for target in grid[1:]:
        singular = False
        while t < target:
            p, h = stepper.advance(p, target - t)
            t = target if target - t - h <= 1e-15 * max(1.0, target) else t + h
            if not math.isfinite(abs(p)) or abs(p) > threshold:
                singular = True
                break
        times.append(t)
        values.append(p)
        sign = _branch_sign(p0, p, t, params)
        if sign != signs[-1]:
            events.append(TrajectoryEvent(EventKind.BRANCH_FLIP, t))
        signs.append(sign)
        if singular:
            events.append(TrajectoryEvent(EventKind.SINGULARITY_DETECTED, t))
            logger.info("Singularity detected at t=%.6g (|p| > %.3g)", t, threshold)
            break
        if not converged and is_converged(p):
            converged = True
            events.append(TrajectoryEvent(EventKind.CONVERGED, t))

    logger.debug(
        "Pointwise trajectory: %d samples, %d rejected substeps", len(times), stepper.rejected
    )
    return CollapseTrajectory(
        times=np.array(times),
        p_values=np.array(values),
        branch_sign=np.array(signs),
        events=tuple(events),
        params=params,
        convergence_delta=convergence_delta,
        singularity_threshold=threshold,
    )
