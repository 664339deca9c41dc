"""Collapse-time scaling: fit log t_c against log(g q^2)."""

from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from collapsar.collapse.solution import collapse_time
from collapsar.core.constants import MIN_SCALING_DECADES, MIN_SCALING_POINTS
from collapsar.core.errors import ConfigError, FitDegenerateError
from collapsar.core.types import CollapseParams

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ScalingPoint:
    g: float
    q: float
    rate: float
    t_c: float


@dataclass(frozen=True)
class ScalingFit:
    """Least-squares line log t_c = slope * log(g q^2) + intercept."""

    points: tuple[ScalingPoint, ...]
    slope: float
    intercept: float
    slope_stderr: float
    p0_ratio: float
    delta: float

    @property
    def decades(self) -> float:
        rates = [p.rate for p in self.points]
        return math.log10(max(rates) / min(rates))


def scaling_sweep(
    g_list: Sequence[float],
    q_list: Sequence[float],
    p0_ratio: float,
    delta: float,
) -> ScalingFit:
    """Measure t_c with p0 = p0_ratio * q on every (g, q) pair and fit the log-log slope."""
    if not 0 < p0_ratio < 1:
        raise ConfigError(f"p0_ratio must lie in (0, 1), got {p0_ratio}")

    points = []
    for g, q in itertools.product(g_list, q_list):
        params = CollapseParams(g=g, q=q)
        timing = collapse_time(p0_ratio * q, params, delta)
        points.append(ScalingPoint(g=g, q=q, rate=params.rate, t_c=timing.measured))

    x = np.log([p.rate for p in points])
    y = np.log([p.t_c for p in points])
    design = np.column_stack([x, np.ones_like(x)])
    coef, _, rank, _ = np.linalg.lstsq(design, y, rcond=None)
    if rank < 2:
        raise FitDegenerateError("all sample points share one value of g q^2", rank=int(rank))

    if len(points) < MIN_SCALING_POINTS:
        raise ConfigError(f"Scaling fit needs at least {MIN_SCALING_POINTS} points, got {len(points)}")
    decades = (x.max() - x.min()) / math.log(10.0)
    if decades < MIN_SCALING_DECADES:
        raise ConfigError(
            f"Sample spans {decades:.2f} decades of g q^2; at least {MIN_SCALING_DECADES} needed"
        )

    residuals = y - design @ coef
    dof = len(points) - 2
    sigma2 = float(residuals @ residuals) / dof if dof > 0 else 0.0
    cov = sigma2 * np.linalg.inv(design.T @ design)
    fit = ScalingFit(
        points=tuple(points),
        slope=float(coef[0]),
        intercept=float(coef[1]),
        slope_stderr=math.sqrt(max(float(cov[0, 0]), 0.0)),
        p0_ratio=p0_ratio,
        delta=delta,
    )
    logger.info(
        "Scaling fit over %d points (%.2f decades): slope %.6f +/- %.2g",
        len(points),
        decades,
        fit.slope,
        fit.slope_stderr,
    )
    return fit
