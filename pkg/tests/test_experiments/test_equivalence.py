"""Tests for the CQHJ vs reference Schroedinger comparison."""

import math

import numpy as np
import pytest

from collapsar.core.errors import ConfigError, DivergedError
from collapsar.core.types import SpatialGrid
from collapsar.dynamics.config import EvolutionConfig
from collapsar.experiments.equivalence import (
    EquivalenceCase,
    compare_case,
    equivalence_sweep,
    gaussian_case,
    plane_wave_case,
)


def _cfg(grid: SpatialGrid, t_max: float, stride: int = 500) -> EvolutionConfig:
    return EvolutionConfig(dt=0.2 * grid.dx**2, t_max=t_max, snapshot_stride=stride)


def test_plane_wave_agrees_to_roundoff(constants):
    grid = SpatialGrid(-math.pi, math.pi, 256)
    case = plane_wave_case(grid, 0.1, constants)
    result = compare_case(case, _cfg(grid, 0.1, stride=200), constants)
    assert case.label == "plane k=0.1"
    assert result.discrepancy <= 1e-10
    assert result.window_nodes == 256 - 4
    assert result.times[-1] == pytest.approx(0.1)


def test_gaussian_packet_agrees(constants):
    grid = SpatialGrid(-8.0, 8.0, 1024)
    case = gaussian_case(grid, constants, sigma0=1.0, k0=2.0)
    report = equivalence_sweep([case], _cfg(grid, 0.5, stride=2000), constants)
    result = report.result("gaussian sigma0=1 k0=2")
    assert result.discrepancy <= 1e-3
    assert report.max_discrepancy == result.discrepancy
    assert len(result.snapshot_discrepancy) == len(result.times)
    # window covers the packet but not the far tails
    assert 8 <= result.window_nodes < grid.n - 4


def test_initial_momentum_defaults_to_log_derivative(constants):
    grid = SpatialGrid(-6.0, 6.0, 256)
    exact = gaussian_case(grid, constants, sigma0=1.0, k0=1.0)
    derived = EquivalenceCase("derived", exact.psi0)
    inner = slice(96, 160)
    np.testing.assert_allclose(
        derived.initial_momentum(constants).values[inner], exact.p0.values[inner], atol=1e-3
    )


def test_divergence_carries_case_label(box_grid, constants):
    case = gaussian_case(box_grid, constants, sigma0=0.05, k0=2.0)
    with pytest.raises(DivergedError) as exc:
        equivalence_sweep([case], _cfg(box_grid, 0.5), constants)
    assert exc.value.label == "gaussian sigma0=0.05 k0=2"
    assert "gaussian sigma0=0.05 k0=2" in str(exc.value)


def test_empty_sweep_rejected(constants):
    with pytest.raises(ConfigError):
        equivalence_sweep([], _cfg(SpatialGrid(0.0, 1.0, 16), 0.01), constants)


def test_missing_label(constants):
    grid = SpatialGrid(-math.pi, math.pi, 64)
    report = equivalence_sweep([plane_wave_case(grid, 1.0, constants)], _cfg(grid, 0.01), constants)
    with pytest.raises(ConfigError):
        report.result("nope")
