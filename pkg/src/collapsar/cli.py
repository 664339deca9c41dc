"""Command-line entry point.

Usage:
    collapsar collapse [options]      single pointwise trajectory
    collapsar evolve-free [options]   free CQHJ field evolution
    collapsar combined [options]      CQHJ evolution with the collapsing force
    collapsar born [options]          Born-rule ensemble
    collapsar scaling [options]       collapse-time scaling fit
    collapsar constraints [options]   experimental constraints table
    collapsar equivalence [options]   CQHJ vs reference Schroedinger sweep
    collapsar potential [options]     V_c(p) and F_c(p) curves

Every run writes manifest.cfg into the output directory; pass it back with
--config to reproduce the run. Exit codes: 0 success, 1 invalid
configuration or data, 2 numerical failure.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
from pathlib import Path
from typing import Any, Callable, Optional, Sequence

from collapsar import __version__
from collapsar.collapse.integrator import evolve_collapse_pointwise
from collapsar.collapse.solution import (
    analytic_psi_field,
    classify_outcome,
    collapse_time,
    pole_time,
)
from collapsar.config.experiments import ExperimentRegistry
from collapsar.config.settings import (
    DISTRIBUTIONS,
    INITIAL_STATES,
    LOG_LEVELS,
    RunSettings,
    build_settings,
    dump_settings,
    read_config_file,
)
from collapsar.core.errors import CollapsarError, ConfigError, DataError, NumericalError
from collapsar.core.types import (
    CollapseParams,
    ComplexField,
    InitialState,
    Outcome,
    PhysicalConstants,
    SpatialGrid,
)
from collapsar.data.records import RecordLoader
from collapsar.dynamics.config import EvolutionConfig
from collapsar.dynamics.cqhj import combined_evolve, evolve_free
from collapsar.experiments.constraints import constraints_table, format_constraints
from collapsar.experiments.ensemble import EnsembleConfig, EpsilonDistribution, born_ensemble
from collapsar.experiments.equivalence import equivalence_sweep, gaussian_case, plane_wave_case
from collapsar.experiments.scaling import scaling_sweep
from collapsar.field.transforms import (
    canonical_grid,
    normalize_mean_square,
    p_to_psi,
    symmetric_momentum,
)
from collapsar.reporting import tables
from collapsar.reporting.visualizer import (
    plot_equivalence,
    plot_potential,
    plot_scaling,
    plot_snapshots,
    plot_trajectory,
)
from collapsar.reporting.writer import RunReport, write_outputs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INVALID = 1
EXIT_NUMERICAL = 2

# B values at which the closed-form wave function is drawn
PSI_SNAPSHOT_B = (1.0, 2.0, 10.0, 1e3)

# t_max per subcommand when none is configured
DEFAULT_T_MAX = {"collapse": 10.0, "evolve-free": 0.5, "combined": 0.5, "equivalence": 0.5}


class _Parser(argparse.ArgumentParser):
    """Report usage errors as ConfigError instead of exiting with status 2."""

    def error(self, message: str) -> None:  # type: ignore[override]
        raise ConfigError(f"{self.prog}: {message}")


# -- argument groups ---------------------------------------------------------


def _flag(parser: argparse.ArgumentParser, name: str, type_: Callable, help_: str, **kw: Any) -> None:
    parser.add_argument(name, type=type_, default=argparse.SUPPRESS, help=help_, **kw)


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", default=None, help="flat key = value config file (e.g. a manifest.cfg)")
    p.add_argument("--out", dest="out_dir", default=argparse.SUPPRESS, help="output directory")
    _flag(p, "--formats", str, "comma-separated subset of csv,json,svg,html")
    _flag(p, "--log-level", str, "logging level", choices=LOG_LEVELS)
    _flag(p, "--hbar", float, "reduced Planck constant (> 0)")
    _flag(p, "--mass", float, "particle mass (> 0)")


def _add_collapse_params(p: argparse.ArgumentParser) -> None:
    _flag(p, "--g", float, "coupling g (> 0)")
    _flag(p, "--q", float, "target momentum q (> 0)")


def _add_grid(p: argparse.ArgumentParser) -> None:
    _flag(p, "--n", int, "grid nodes (>= 8)")
    _flag(p, "--x-min", float, "left edge (gaussian and plane initial states)")
    _flag(p, "--x-max", float, "right edge (gaussian and plane initial states)")


def _add_stepping(p: argparse.ArgumentParser) -> None:
    _flag(p, "--dt", float, "time step (> 0); default: the explicit stability limit")
    _flag(p, "--t-max", float, "final time (> 0)")
    _flag(p, "--snapshot-stride", int, "steps between stored snapshots (>= 1)")
    _flag(p, "--safety", float, "stability factor in dt <= safety * dx^2 * m / hbar")


def _add_state(p: argparse.ArgumentParser) -> None:
    _flag(p, "--initial", str, "initial state", choices=INITIAL_STATES)
    _flag(p, "--k", float, "wavenumber of the symmetric or plane-wave state (> 0)")
    _flag(p, "--epsilon", float, "real momentum perturbation of the symmetric state")
    _flag(p, "--sigma0", float, "gaussian width (> 0)")
    _flag(p, "--k0", float, "gaussian mean wavenumber")
    _flag(p, "--x0", float, "gaussian centre")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="collapsar", description="Wave-function collapse as CQHJ dynamics.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("collapse", help="single pointwise trajectory from p0")
    _add_common(p)
    _add_collapse_params(p)
    _flag(p, "--p0-re", float, "Re p0")
    _flag(p, "--p0-im", float, "Im p0")
    _flag(p, "--t-max", float, "final time (> 0)")
    _flag(p, "--dt", float, "sample spacing (> 0), default 0.01")
    _flag(p, "--delta", float, "convergence tolerance in (0, 1)")
    _flag(p, "--k", float, "wavenumber used for the |psi| snapshots")
    _flag(p, "--epsilon", float, "perturbation used for the |psi| snapshots")
    _flag(p, "--n", int, "grid nodes for the |psi| snapshots")

    for name, help_ in (
        ("evolve-free", "free CQHJ evolution of a momentum field"),
        ("combined", "CQHJ evolution with the collapsing force"),
    ):
        p = sub.add_parser(name, help=help_)
        _add_common(p)
        _add_state(p)
        _add_grid(p)
        _add_stepping(p)
        if name == "combined":
            _add_collapse_params(p)

    p = sub.add_parser("born", help="Born-rule ensemble over random Re p0")
    _add_common(p)
    _add_collapse_params(p)
    _flag(p, "--k", float, "wavenumber (sets the probe position)")
    _flag(p, "--trials", int, "number of trials (>= 1)")
    _flag(p, "--seed", int, "ensemble seed (default from COLLAPSAR_SEED)")
    _flag(p, "--epsilon-scale", float, "width of the epsilon distribution (> 0)")
    _flag(p, "--distribution", str, "epsilon distribution", choices=DISTRIBUTIONS)
    _flag(p, "--probe-phase", float, "k x_probe in units of pi, in (-0.5, 0.5)")
    _flag(p, "--verify-every", int, "closed-form check on every n-th trial (>= 1)")
    _flag(p, "--workers", int, "worker processes (>= 1)")
    _flag(p, "--confidence", float, "binomial interval confidence in (0, 1)")
    p.add_argument("--mirror", action="store_true", default=argparse.SUPPRESS, help="negate every epsilon")

    p = sub.add_parser("scaling", help="collapse-time scaling fit")
    _add_common(p)
    _flag(p, "--g-list", str, "comma-separated couplings")
    _flag(p, "--q-list", str, "comma-separated target momenta")
    _flag(p, "--p0-ratio", float, "p0 / q in (0, 1)")
    _flag(p, "--delta", float, "convergence tolerance in (0, 1)", dest="scaling_delta")

    p = sub.add_parser("constraints", help="experimental constraints table")
    _add_common(p)
    _flag(p, "--records", str, "CSV with extra rows (name, tau_m_s, tau_E_s[, printed_r, reference])")
    _flag(p, "--factor", float, "fidelity factor for printed r values (> 1)")

    p = sub.add_parser("equivalence", help="CQHJ vs reference Schroedinger sweep")
    _add_common(p)
    _add_grid(p)
    _add_stepping(p)
    _flag(p, "--k", float, "plane-wave wavenumber (> 0)")
    _flag(p, "--sigma0", float, "gaussian width (> 0)")
    _flag(p, "--k0", float, "gaussian mean wavenumber")
    _flag(p, "--x0", float, "gaussian centre")
    _flag(p, "--window-threshold", float, "density fraction defining the comparison window")

    p = sub.add_parser("potential", help="collapsing potential and force curves")
    _add_common(p)
    _add_collapse_params(p)

    return parser


# -- subcommands -------------------------------------------------------------


def _constants(s: RunSettings) -> PhysicalConstants:
    return PhysicalConstants(hbar=s.hbar, mass=s.mass)


def _t_max(s: RunSettings) -> float:
    return s.t_max if s.t_max is not None else DEFAULT_T_MAX[s.command]


def _params(s: RunSettings) -> CollapseParams:
    return CollapseParams(g=s.g, q=s.q)


def _run_collapse(s: RunSettings) -> RunReport:
    c = _constants(s)
    params = _params(s)
    p0 = complex(s.p0_re, s.p0_im)
    t_max = _t_max(s)
    traj = evolve_collapse_pointwise(p0, params, s.dt or 0.01, t_max, convergence_delta=s.delta)

    summary = tables.trajectory_summary(traj)
    outcome = classify_outcome(p0)
    summary["outcome"] = outcome.value
    summary["tau_c_nominal"] = params.tau_c_nominal
    if outcome is Outcome.UNDETERMINED:
        summary["pole_time"] = pole_time(p0, params)
    else:
        summary["collapse_time"] = collapse_time(p0, params, s.delta).measured

    state = InitialState(k=s.k, epsilon=s.epsilon)
    grid = canonical_grid(state, s.n)
    snapshots = [
        (t, analytic_psi_field(grid, t, state, params, c))
        for t in (math.log(b) / params.rate for b in PSI_SNAPSHOT_B)
    ]
    return RunReport(
        name="collapse",
        summary=summary,
        tables={"trajectory": tables.trajectory_frame(traj)},
        figures={"trajectory": plot_trajectory(traj), "psi_snapshots": plot_snapshots(snapshots)},
    )


def _initial_field(s: RunSettings, c: PhysicalConstants) -> ComplexField:
    if s.initial == "symmetric":
        state = InitialState(k=s.k, epsilon=s.epsilon)
        return symmetric_momentum(canonical_grid(state, s.n), state, c)
    grid = SpatialGrid(s.x_min, s.x_max, s.n)
    if s.initial == "gaussian":
        return gaussian_case(grid, c, sigma0=s.sigma0, k0=s.k0, x0=s.x0).p0
    return plane_wave_case(grid, s.k, c).p0


def _evolution_config(s: RunSettings, grid: SpatialGrid, c: PhysicalConstants) -> EvolutionConfig:
    dt = s.dt if s.dt is not None else s.safety * grid.dx**2 * c.mass / c.hbar
    return EvolutionConfig(dt=dt, t_max=_t_max(s), snapshot_stride=s.snapshot_stride, safety=s.safety)


def _run_field(s: RunSettings, with_force: bool) -> RunReport:
    c = _constants(s)
    p0 = _initial_field(s, c)
    cfg = _evolution_config(s, p0.grid, c)
    if with_force:
        series = combined_evolve(p0, cfg, _params(s), c)
    else:
        series = evolve_free(p0, cfg, c)

    snapshots = []
    for i in range(len(series)):
        try:
            psi = normalize_mean_square(p_to_psi(series[i], c))
        except NumericalError:
            continue
        snapshots.append((float(series.times[i]), psi))
    final = series.final.values
    return RunReport(
        name=s.command,
        summary={
            "initial": s.initial,
            "n": p0.grid.n,
            "dt": cfg.step,
            "n_steps": cfg.n_steps,
            "n_snapshots": len(series),
            "t_final": float(series.times[-1]),
            "max_abs_p_final": float(abs(final).max()),
            "mean_re_p_final": float(final.real.mean()),
        },
        tables={"field": tables.field_frame(series, c)},
        figures={"psi_snapshots": plot_snapshots(snapshots)},
    )


def _run_born(s: RunSettings) -> RunReport:
    cfg = EnsembleConfig(
        n_trials=s.trials,
        epsilon_scale=s.epsilon_scale,
        distribution=EpsilonDistribution(s.distribution),
        seed=s.seed,
        probe_phase=s.probe_phase,
        mirror=s.mirror,
        verify_every=s.verify_every,
        workers=s.workers,
        confidence=s.confidence,
    )
    result = born_ensemble(cfg, _params(s), InitialState(k=s.k), _constants(s))
    return RunReport(name="born", summary=tables.ensemble_summary(result))


def _run_scaling(s: RunSettings) -> RunReport:
    fit = scaling_sweep(s.g_values, s.q_values, s.p0_ratio, s.scaling_delta)
    return RunReport(
        name="scaling",
        summary=tables.scaling_summary(fit),
        tables={"scaling": tables.scaling_frame(fit)},
        figures={"scaling": plot_scaling(fit)},
    )


def _run_constraints(s: RunSettings) -> RunReport:
    registry = ExperimentRegistry()
    if s.records:
        for record in RecordLoader().load(s.records):
            registry.register(record)
    report = constraints_table(registry.records(), factor=s.factor)
    return RunReport(
        name="constraints",
        summary={
            "most_constraining_absolute": report.most_constraining_absolute,
            "most_constraining_relative": report.most_constraining_relative,
            "factor": report.factor,
            "all_within_factor": report.all_within_factor,
        },
        tables={"constraints": tables.constraints_frame(report)},
        text=format_constraints(report),
    )


def _run_equivalence(s: RunSettings) -> RunReport:
    c = _constants(s)
    grid = SpatialGrid(s.x_min, s.x_max, s.n)
    cases = [
        plane_wave_case(grid, s.k, c),
        gaussian_case(grid, c, sigma0=s.sigma0, k0=s.k0, x0=s.x0),
    ]
    report = equivalence_sweep(cases, _evolution_config(s, grid, c), c, s.window_threshold)
    return RunReport(
        name="equivalence",
        summary={
            "max_discrepancy": report.max_discrepancy,
            "window_threshold": report.window_threshold,
            "cases": {r.label: r.discrepancy for r in report.results},
        },
        tables={"equivalence": tables.equivalence_frame(report)},
        figures={"equivalence": plot_equivalence(report)},
    )


def _run_potential(s: RunSettings) -> RunReport:
    params = _params(s)
    curve = tables.potential_frame(params)
    return RunReport(
        name="potential",
        summary={"g": params.g, "q": params.q, "v_c_at_zero": params.g * params.q**4 / 2.0},
        tables={"potential": curve},
        figures={"potential": plot_potential(curve, params.q)},
    )


COMMANDS: dict[str, Callable[[RunSettings], RunReport]] = {
    "collapse": _run_collapse,
    "evolve-free": lambda s: _run_field(s, with_force=False),
    "combined": lambda s: _run_field(s, with_force=True),
    "born": _run_born,
    "scaling": _run_scaling,
    "constraints": _run_constraints,
    "equivalence": _run_equivalence,
    "potential": _run_potential,
}


# -- entry points ------------------------------------------------------------


def resolve_settings(argv: Optional[Sequence[str]] = None) -> RunSettings:
    """Parse argv and merge defaults < environment < config file < flags."""
    args = vars(build_parser().parse_args(argv))
    config_path = args.pop("config", None)
    file_values = read_config_file(config_path) if config_path else {}
    return build_settings(**{**file_values, **args})


def _configure_logging(level: str) -> None:
    logging.basicConfig(format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger().setLevel(level)


def run_cli(argv: Optional[Sequence[str]] = None) -> int:
    """Run one subcommand; returns the process exit code."""
    try:
        settings = resolve_settings(argv)
        _configure_logging(settings.log_level)
        logger.info("collapsar %s: %s", __version__, settings.command)

        report = COMMANDS[settings.command](settings)
        if report.text:
            print(report.text)
        files = write_outputs(report, settings.format_set, settings.out_dir)
        manifest = Path(settings.out_dir) / "manifest.cfg"
        try:
            manifest.write_text(dump_settings(settings), encoding="utf-8")
        except OSError as e:
            raise DataError(f"Failed to write {manifest}: {e}") from e
        for path in [*files, manifest]:
            print(path)
        return EXIT_OK
    except SystemExit as e:
        # --help / --version
        return int(e.code or 0)
    except (ConfigError, DataError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except NumericalError as e:
        print(f"numerical failure: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except CollapsarError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID


def main() -> int:
    return run_cli(sys.argv[1:])


if __name__ == "__main__":
    sys.exit(main())
