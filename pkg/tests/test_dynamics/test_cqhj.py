"""Tests for CQHJ field evolution."""

import math

import numpy as np
import pytest

from collapsar.collapse.solution import analytic_p, momentum_field
from collapsar.core.errors import ConfigError, DivergedError, NonFiniteError
from collapsar.core.types import (
    CollapseParams,
    ComplexField,
    FieldKind,
    InitialState,
    PhysicalConstants,
    SpatialGrid,
)
from collapsar.dynamics.config import EvolutionConfig, EvolutionScheme, zero_potential
from collapsar.dynamics.cqhj import combined_evolve, cqhj_rhs, evolve_free, hamiltonian_field
from collapsar.field.transforms import canonical_grid, symmetric_momentum


def _stable_dt(grid: SpatialGrid, c: PhysicalConstants, safety: float = 0.2) -> float:
    return safety * grid.dx**2 * c.mass / c.hbar


def test_plane_wave_is_stationary(constants):
    grid = SpatialGrid(-math.pi, math.pi, 64)
    p = ComplexField(grid, np.full(64, 0.5), FieldKind.MOMENTUM_FIELD)
    rhs = cqhj_rhs(p, None, constants)
    np.testing.assert_allclose(rhs.values, 0.0, atol=1e-12)

    H = hamiltonian_field(p, zero_potential(grid), constants)
    assert H.kind == FieldKind.POTENTIAL_FIELD
    np.testing.assert_allclose(H.values, 0.125, atol=1e-12)


def test_rhs_includes_potential_gradient(constants):
    grid = SpatialGrid(-1.0, 1.0, 41)
    p = ComplexField(grid, np.zeros(41), FieldKind.MOMENTUM_FIELD)
    V = ComplexField(grid, 0.5 * grid.nodes**2, FieldKind.POTENTIAL_FIELD)
    rhs = cqhj_rhs(p, V, constants)
    np.testing.assert_allclose(rhs.values, -grid.nodes, atol=1e-10)


def test_rhs_rejects_non_finite(constants):
    grid = SpatialGrid(0.0, 1.0, 16)
    values = np.zeros(16, dtype=complex)
    values[3] = np.inf
    with pytest.raises(NonFiniteError):
        cqhj_rhs(ComplexField(grid, values, FieldKind.MOMENTUM_FIELD), None, constants)


def test_free_evolution_keeps_plane_wave(constants):
    grid = SpatialGrid(-math.pi, math.pi, 128)
    p0 = ComplexField(grid, np.full(128, 1.5), FieldKind.MOMENTUM_FIELD)
    cfg = EvolutionConfig(dt=_stable_dt(grid, constants), t_max=0.05, snapshot_stride=10)
    series = evolve_free(p0, cfg, constants)
    assert series.kind == FieldKind.MOMENTUM_FIELD
    assert series.times[0] == 0.0
    assert series.times[-1] == pytest.approx(0.05)
    np.testing.assert_allclose(series.final.values, 1.5, atol=1e-12)


def test_snapshot_stride(constants):
    grid = SpatialGrid(-1.0, 1.0, 32)
    p0 = ComplexField(grid, np.zeros(32), FieldKind.MOMENTUM_FIELD)
    dt = _stable_dt(grid, constants)
    cfg = EvolutionConfig(dt=dt, t_max=25 * dt, snapshot_stride=10)
    assert cfg.snapshot_indices() == [0, 10, 20, 25]
    series = evolve_free(p0, cfg, constants)
    assert len(series) == 4


def test_stability_guard(constants):
    grid = SpatialGrid(-1.0, 1.0, 32)
    p0 = ComplexField(grid, np.zeros(32), FieldKind.MOMENTUM_FIELD)
    cfg = EvolutionConfig(dt=10 * _stable_dt(grid, constants), t_max=1.0)
    with pytest.raises(ConfigError):
        evolve_free(p0, cfg, constants)


def test_gaussian_free_spreading_matches_exact(constants):
    """p(x, t) = hbar (k0 sigma0^2 + i (x - x0)) / (sigma0^2 + i hbar t / m) stays exact inside."""
    grid = SpatialGrid(-8.0, 8.0, 321)
    k0, sigma0 = 1.0, 1.0
    x = grid.nodes
    p0 = ComplexField(grid, k0 + 1j * x / sigma0**2, FieldKind.MOMENTUM_FIELD)
    cfg = EvolutionConfig(dt=_stable_dt(grid, constants), t_max=0.2, snapshot_stride=1000)
    series = evolve_free(p0, cfg, constants)
    t = series.times[-1]
    exact = (k0 * sigma0**2 + 1j * x) / (sigma0**2 + 1j * t)
    inner = np.abs(x) < 3.0
    np.testing.assert_allclose(series.final.values[inner], exact[inner], atol=1e-3)


def test_narrow_packet_diverges(box_grid, constants):
    x = box_grid.nodes
    p0 = ComplexField(box_grid, 1j * x / 0.05**2, FieldKind.MOMENTUM_FIELD)
    cfg = EvolutionConfig(dt=_stable_dt(box_grid, constants), t_max=0.5)
    with pytest.raises(DivergedError) as exc:
        evolve_free(p0, cfg, constants)
    assert 0.0 < exc.value.t <= 0.5


def test_combined_without_coupling_equals_free(constants):
    state = InitialState(k=1.0, epsilon=0.2)
    grid = SpatialGrid(-0.5, 0.5, 33)
    p0 = symmetric_momentum(grid, state, constants)
    cfg = EvolutionConfig(dt=_stable_dt(grid, constants), t_max=0.01)
    free = evolve_free(p0, cfg, constants)
    combined = combined_evolve(p0, cfg, None, constants)
    np.testing.assert_array_equal(free.values, combined.values)


def test_force_dominated_evolution_follows_closed_form(constants):
    state = InitialState(k=1.0, epsilon=0.3)
    params = CollapseParams(g=1000.0, q=1.0)
    grid = SpatialGrid(-0.5, 0.5, 65)
    p0 = symmetric_momentum(grid, state, constants)
    t_max = 5.0 * params.tau_c_nominal
    cfg = EvolutionConfig(dt=_stable_dt(grid, constants), t_max=t_max, snapshot_stride=1000)
    series = combined_evolve(p0, cfg, params, constants)
    expected = momentum_field(grid, series.times[-1], state, params, constants)
    scale = np.max(np.abs(expected.values))
    assert np.max(np.abs(series.final.values - expected.values)) / scale < 0.02
    # every node heads for +q
    assert np.all(series.final.values.real > 0.9)


def test_free_symmetric_state_stays_imaginary(constants):
    state = InitialState(k=1.0)
    grid = canonical_grid(state, 256)
    p0 = symmetric_momentum(grid, state, constants)
    cfg = EvolutionConfig(dt=_stable_dt(grid, constants), t_max=0.5, snapshot_stride=100_000)
    series = evolve_free(p0, cfg, constants)
    # stencil residue only; no node picks an outcome on its own
    assert np.max(np.abs(series.final.values.real)) < 1e-4
    np.testing.assert_allclose(series.final.values.imag, p0.values.imag, atol=1e-3)


@pytest.mark.parametrize("n, epsilon, t_max", [(64, 0.1, 0.5), (256, 0.3, 0.05)])
def test_combined_runs_on_canonical_grid(constants, unit_params, n, epsilon, t_max):
    state = InitialState(k=1.0, epsilon=epsilon)
    grid = canonical_grid(state, n)
    p0 = symmetric_momentum(grid, state, constants)
    cfg = EvolutionConfig(dt=_stable_dt(grid, constants), t_max=t_max, snapshot_stride=50)
    series = combined_evolve(p0, cfg, unit_params, constants)
    assert series.times[-1] == pytest.approx(t_max)
    assert np.all(np.isfinite(series.values))
    assert np.max(np.abs(series.values)) < 1e4
    # the perturbation has already tipped the centre towards +q
    centre = series.final.values[n // 2]
    assert centre.real > epsilon


def test_combined_edge_nodes_follow_pointwise_flow(constants, unit_params):
    state = InitialState(k=1.0, epsilon=0.1)
    grid = canonical_grid(state, 64)
    p0 = symmetric_momentum(grid, state, constants)
    cfg = EvolutionConfig(dt=_stable_dt(grid, constants), t_max=0.02, snapshot_stride=100_000)
    series = combined_evolve(p0, cfg, unit_params, constants)
    t = float(series.times[-1])
    for j in (0, 1, -2, -1):
        expected, _ = analytic_p(complex(p0.values[j]), t, unit_params)
        assert series.final.values[j] == pytest.approx(expected, rel=1e-9)


def test_reference_scheme_keeps_plane_wave(constants):
    grid = SpatialGrid(-math.pi, math.pi, 128)
    p0 = ComplexField(grid, np.full(128, 0.5), FieldKind.MOMENTUM_FIELD)
    cfg = EvolutionConfig(
        dt=0.01, t_max=0.2, scheme=EvolutionScheme.REFERENCE, snapshot_stride=5
    )
    series = evolve_free(p0, cfg, constants)
    assert series.kind == FieldKind.MOMENTUM_FIELD
    assert len(series) == 5
    np.testing.assert_allclose(series.final.values, 0.5, atol=1e-6)


def test_reference_scheme_cannot_carry_force(constants, unit_params):
    grid = SpatialGrid(-math.pi, math.pi, 64)
    p0 = ComplexField(grid, np.full(64, 0.5), FieldKind.MOMENTUM_FIELD)
    cfg = EvolutionConfig(dt=0.01, t_max=0.1, scheme=EvolutionScheme.REFERENCE)
    with pytest.raises(ConfigError, match="reference solver"):
        combined_evolve(p0, cfg, unit_params, constants)
    assert len(combined_evolve(p0, cfg, None, constants)) == len(evolve_free(p0, cfg, constants))
