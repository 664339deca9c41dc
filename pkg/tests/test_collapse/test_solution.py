"""Tests for the closed-form collapse solution and the reconstructed wave function."""

import math

import numpy as np
import pytest

from collapsar.collapse.solution import (
    analytic_p,
    analytic_psi,
    analytic_psi_field,
    classify_outcome,
    collapse_time,
    evaluate_closed_form,
    momentum_field,
    pole_time,
)
from collapsar.core.errors import ConfigError, NeverConvergesError, SingularityError
from collapsar.core.types import CollapseParams, InitialState, Outcome
from collapsar.field.stencils import trapezoid
from collapsar.field.transforms import canonical_grid, psi_to_p


def _logistic(p0: float, t: float, params: CollapseParams) -> float:
    b2 = math.exp(2.0 * params.rate * t)
    return params.q * p0 * math.sqrt(b2) / math.sqrt(p0 * p0 * (b2 - 1.0) + params.q**2)


def test_initial_value(unit_params):
    p, branch = analytic_p(0.3 + 0.2j, 0.0, unit_params)
    assert p == pytest.approx(0.3 + 0.2j)
    assert branch == 1


def test_real_trajectory_matches_logistic_form():
    params = CollapseParams(g=0.5, q=2.0)
    for t in (0.1, 0.5, 1.0, 3.0):
        p, _ = analytic_p(0.2, t, params)
        assert p.imag == 0.0
        assert p.real == pytest.approx(_logistic(0.2, t, params), rel=1e-12)


def test_outcomes_follow_sign_of_real_part(unit_params):
    for eps, target in ((1e-3, 1.0), (-1e-3, -1.0)):
        p, _ = analytic_p(complex(eps, 0.4), 40.0, unit_params)
        assert p.real == pytest.approx(target, abs=1e-9)
        assert abs(p.imag) < 1e-9


def test_late_times_do_not_overflow(unit_params):
    p, _ = analytic_p(0.1, 1e6, unit_params)
    assert p == pytest.approx(1.0, abs=1e-15)


def test_pole_time_only_for_imaginary_start(unit_params):
    assert pole_time(0.5j, unit_params) == pytest.approx(math.log(5.0) / 2.0)
    assert pole_time(0.1 + 0.5j, unit_params) is None
    assert pole_time(0.0, unit_params) is None


def test_analytic_p_raises_at_and_past_pole(unit_params):
    t_star = pole_time(0.5j, unit_params)
    p, _ = analytic_p(0.5j, 0.99 * t_star, unit_params)
    assert p.real == 0.0
    assert abs(p) > 5.0
    with pytest.raises(SingularityError) as exc:
        analytic_p(0.5j, t_star, unit_params)
    assert exc.value.t_star == t_star
    with pytest.raises(SingularityError):
        analytic_p(0.5j, 2.0 * t_star, unit_params)


def test_sheet_continuation_past_pole(unit_params):
    p0 = np.array([0.5j, -0.5j])
    t = 20.0
    plus, _ = evaluate_closed_form(p0, t, unit_params, sheet=1)
    minus, _ = evaluate_closed_form(p0, t, unit_params, sheet=-1)
    np.testing.assert_allclose(plus, 1.0, atol=1e-9)
    np.testing.assert_allclose(minus, -1.0, atol=1e-9)


def test_zero_stays_zero(unit_params):
    p, _ = analytic_p(0.0, 5.0, unit_params)
    assert p == 0.0


def test_negative_time_rejected(unit_params):
    with pytest.raises(ConfigError):
        analytic_p(0.1, -1.0, unit_params)


def test_classify_outcome():
    assert classify_outcome(1e-12 + 3j) is Outcome.PLUS
    assert classify_outcome(-1e-12) is Outcome.MINUS
    assert classify_outcome(2j) is Outcome.UNDETERMINED


def test_collapse_time_matches_closed_form_inversion(unit_params):
    delta = 1e-6
    timing = collapse_time(0.1, unit_params, delta)
    # 1 - 1/sqrt(1 + 99 u) = delta with u = exp(-2t)
    u = (1.0 / (1.0 - delta) ** 2 - 1.0) / 99.0
    assert timing.measured == pytest.approx(-0.5 * math.log(u), rel=1e-9)
    assert timing.nominal == 1.0
    assert timing.ratio == pytest.approx(timing.measured)


def test_collapse_time_scales_with_rate():
    slow = collapse_time(0.05, CollapseParams(g=1.0, q=1.0), 1e-3)
    fast = collapse_time(0.1, CollapseParams(g=1.0, q=2.0), 1e-3)
    assert slow.measured / fast.measured == pytest.approx(4.0, rel=1e-12)


def test_collapse_time_already_converged(unit_params):
    assert collapse_time(1.0, unit_params, 1e-6).measured == 0.0


def test_collapse_time_never_converges_when_symmetric(unit_params):
    with pytest.raises(NeverConvergesError):
        collapse_time(0.3j, unit_params, 1e-6)
    with pytest.raises(ConfigError):
        collapse_time(0.1, unit_params, 1.5)


def test_momentum_field_starts_at_tan_profile(symmetric_state, constants, unit_params):
    grid = canonical_grid(symmetric_state, 64)
    p = momentum_field(grid, 0.0, symmetric_state, unit_params, constants)
    np.testing.assert_allclose(p.values, 1j * np.tan(grid.nodes), rtol=1e-12)


def test_momentum_field_collapses_to_perturbation_sign(constants, unit_params):
    state = InitialState(k=1.0, epsilon=-1e-4)
    grid = canonical_grid(state, 64)
    p = momentum_field(grid, 40.0, state, unit_params, constants, sheet=1)
    np.testing.assert_allclose(p.values, -1.0, atol=1e-6)


@pytest.mark.parametrize("b", [1.0, 2.0, 10.0, 1e3])
def test_wave_function_consistent_with_momentum_field(b, symmetric_state, constants, unit_params):
    """p = (hbar/i) psi'/psi of the closed-form psi equals the closed-form p."""
    grid = canonical_grid(symmetric_state, 2048)
    t = math.log(b) / unit_params.rate
    psi = analytic_psi_field(grid, t, symmetric_state, unit_params, constants, sheet=1)
    p = momentum_field(grid, t, symmetric_state, unit_params, constants, sheet=1)
    from_psi = psi_to_p(psi, constants).values

    x = grid.nodes
    branch_x = math.asin(1.0 / b) / symmetric_state.k
    keep = (np.abs(x - branch_x) >= 0.05) & (np.abs(x + branch_x) >= 0.05)
    np.testing.assert_allclose(from_psi[keep], p.values[keep], rtol=1e-4, atol=1e-6)


def test_wave_function_normalized(symmetric_state, constants, unit_params):
    grid = canonical_grid(symmetric_state, 2048)
    for t in (0.0, 1.0, 5.0):
        psi = analytic_psi_field(grid, t, symmetric_state, unit_params, constants)
        mean_square = trapezoid(np.abs(psi.values) ** 2, grid.dx) / (math.pi / symmetric_state.k)
        assert mean_square == pytest.approx(1.0, abs=1e-2)


def test_wave_function_limits(symmetric_state, constants, unit_params):
    # t = 0: sqrt(2) cos kx
    assert analytic_psi(0.3, 0.0, symmetric_state, unit_params, constants) == pytest.approx(
        math.sqrt(2.0) * math.cos(0.3), rel=1e-6
    )
    # late: exp(i sheet k x)
    late = 40.0
    assert analytic_psi(0.3, late, symmetric_state, unit_params, constants, sheet=1) == pytest.approx(
        complex(math.cos(0.3), math.sin(0.3)), abs=1e-6
    )
    assert analytic_psi(0.3, late, symmetric_state, unit_params, constants, sheet=-1) == pytest.approx(
        complex(math.cos(0.3), -math.sin(0.3)), abs=1e-6
    )


def test_wave_function_point_checks(symmetric_state, constants, unit_params):
    with pytest.raises(ConfigError):
        analytic_psi(2.0, 1.0, symmetric_state, unit_params, constants)
    with pytest.raises(ConfigError):
        analytic_psi(0.1, 1.0, symmetric_state, unit_params, constants, sheet=0)


@pytest.mark.parametrize("eps", [1e-8, -1e-8])
def test_tiny_real_part_decides_outcome(eps):
    rng = np.random.default_rng(3)
    for _ in range(500):
        g, q = rng.uniform(0.1, 10.0, size=2)
        params = CollapseParams(g=float(g), q=float(q))
        p0 = complex(eps, q * math.tan(rng.uniform(-1.4, 1.4)))
        p, _ = analytic_p(p0, 30.0 / params.rate, params)
        target = q if classify_outcome(p0) is Outcome.PLUS else -q
        assert math.copysign(1.0, target) == math.copysign(1.0, eps)
        assert abs(p.real - target) < 1e-6
