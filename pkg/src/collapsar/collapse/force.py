"""Collapsing force, collapsing potential and the amplification factor B(t).

The force g p (q^2 - p^2) is the lowest-order odd polynomial vanishing at the
two outcomes p = +-q; V_c = (g/2)(q^2 - p^2)^2 is its double-well potential
in momentum space. Both accept Python complex scalars or numpy arrays.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from collapsar.core.constants import LOG_OVERFLOW
from collapsar.core.errors import ConfigError
from collapsar.core.types import CollapseParams


def collapsing_force(p, params: CollapseParams):
    """F_c(p) = g p (q^2 - p^2)."""
    return params.g * p * (params.q * params.q - p * p)


def collapsing_potential(p, params: CollapseParams):
    """V_c(p) = (g/2) (q^2 - p^2)^2, so F_c = -dV_c/dp."""
    d = params.q * params.q - p * p
    return 0.5 * params.g * d * d


@dataclass(frozen=True)
class AmplificationFactor:
    """B(t) = exp(g q^2 t), carried as its logarithm."""

    log: float

    @property
    def value(self) -> float:
        return math.exp(self.log) if self.log < LOG_OVERFLOW else math.inf

    @property
    def inverse_square(self) -> float:
        """B^-2, underflows gracefully to 0."""
        return math.exp(-2.0 * self.log)

    @property
    def inverse(self) -> float:
        return math.exp(-self.log)


def b_factor(t: float, params: CollapseParams) -> AmplificationFactor:
    if t < 0:
        raise ConfigError(f"B(t) is defined for t >= 0, got t={t}")
    return AmplificationFactor(params.rate * t)
