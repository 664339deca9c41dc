"""Tabular views of results: one pandas DataFrame per CSV output.

Column names and order here are the output schema for every subcommand:

    trajectory   t, re_p, im_p, branch_sign, event
    field        t, x, re_p, im_p, abs_psi
    constraints  name, tau_m_s, tau_E_s, r, kappa_bound, printed_r, within_factor, reference
    scaling      g, q, rate, t_c
    equivalence  label, t, discrepancy
    potential    p, v_c, f_c
"""

from __future__ import annotations

from typing import Any

import numpy as np
import pandas as pd

from collapsar.collapse.force import collapsing_force, collapsing_potential
from collapsar.core.errors import CollapsarError
from collapsar.core.types import CollapseParams, CollapseTrajectory, FieldSeries, PhysicalConstants
from collapsar.experiments.constraints import ConstraintReport
from collapsar.experiments.ensemble import EnsembleResult
from collapsar.experiments.equivalence import EquivalenceReport
from collapsar.experiments.scaling import ScalingFit
from collapsar.field.transforms import normalize_mean_square, p_to_psi

TRAJECTORY_COLUMNS = ["t", "re_p", "im_p", "branch_sign", "event"]
FIELD_COLUMNS = ["t", "x", "re_p", "im_p", "abs_psi"]
CONSTRAINT_COLUMNS = [
    "name",
    "tau_m_s",
    "tau_E_s",
    "r",
    "kappa_bound",
    "printed_r",
    "within_factor",
    "reference",
]
SCALING_COLUMNS = ["g", "q", "rate", "t_c"]
EQUIVALENCE_COLUMNS = ["label", "t", "discrepancy"]
POTENTIAL_COLUMNS = ["p", "v_c", "f_c"]


def trajectory_frame(traj: CollapseTrajectory) -> pd.DataFrame:
    return pd.DataFrame(
        {
            "t": traj.times,
            "re_p": traj.p_values.real,
            "im_p": traj.p_values.imag,
            "branch_sign": traj.branch_sign,
            "event": [traj.event_at(float(t)) for t in traj.times],
        },
        columns=TRAJECTORY_COLUMNS,
    )


def field_frame(series: FieldSeries, c: PhysicalConstants) -> pd.DataFrame:
    """Long format, one row per (snapshot, node); |psi| rebuilt from p when possible."""
    x = series.grid.nodes
    frames = []
    for i in range(len(series)):
        p = series[i]
        try:
            abs_psi = np.abs(normalize_mean_square(p_to_psi(p, c)).values)
        except CollapsarError:
            abs_psi = np.full(x.size, np.nan)
        frames.append(
            pd.DataFrame(
                {
                    "t": series.times[i],
                    "x": x,
                    "re_p": p.values.real,
                    "im_p": p.values.imag,
                    "abs_psi": abs_psi,
                }
            )
        )
    return pd.concat(frames, ignore_index=True)[FIELD_COLUMNS]


def constraints_frame(report: ConstraintReport) -> pd.DataFrame:
    rows = [
        {
            "name": r.name,
            "tau_m_s": r.tau_m,
            "tau_E_s": r.tau_E,
            "r": r.r,
            "kappa_bound": r.kappa_bound,
            "printed_r": r.printed_r,
            "within_factor": r.within_factor(report.factor),
            "reference": r.reference,
        }
        for r in report.rows
    ]
    return pd.DataFrame(rows, columns=CONSTRAINT_COLUMNS)


def scaling_frame(fit: ScalingFit) -> pd.DataFrame:
    return pd.DataFrame(
        [{"g": p.g, "q": p.q, "rate": p.rate, "t_c": p.t_c} for p in fit.points],
        columns=SCALING_COLUMNS,
    )


def equivalence_frame(report: EquivalenceReport) -> pd.DataFrame:
    rows = [
        {"label": r.label, "t": float(t), "discrepancy": float(d)}
        for r in report.results
        for t, d in zip(r.times, r.snapshot_discrepancy)
    ]
    return pd.DataFrame(rows, columns=EQUIVALENCE_COLUMNS)


def potential_frame(params: CollapseParams, samples: int = 401) -> pd.DataFrame:
    """V_c and F_c on real p in [-2q, 2q]; odd sample counts include p = 0 and +-q."""
    p = np.linspace(-2.0 * params.q, 2.0 * params.q, samples)
    return pd.DataFrame(
        {"p": p, "v_c": collapsing_potential(p, params), "f_c": collapsing_force(p, params)},
        columns=POTENTIAL_COLUMNS,
    )


def ensemble_summary(result: EnsembleResult) -> dict[str, Any]:
    return {
        "n_trials": result.n_trials,
        "n_plus": result.n_plus,
        "n_minus": result.n_minus,
        "n_undetermined": result.n_undetermined,
        "fraction_plus": result.fraction_plus,
        "binomial_ci": list(result.binomial_ci),
        "confidence": result.confidence,
        "n_verified": result.n_verified,
        "n_verified_agree": result.n_verified_agree,
    }


def scaling_summary(fit: ScalingFit) -> dict[str, Any]:
    return {
        "slope": fit.slope,
        "slope_stderr": fit.slope_stderr,
        "intercept": fit.intercept,
        "decades": fit.decades,
        "n_points": len(fit.points),
        "p0_ratio": fit.p0_ratio,
        "delta": fit.delta,
    }


def trajectory_summary(traj: CollapseTrajectory) -> dict[str, Any]:
    final = traj.final_p
    return {
        "final_re_p": final.real,
        "final_im_p": final.imag,
        "events": [{"kind": e.kind.value, "t": e.t} for e in traj.events],
        "convergence_delta": traj.convergence_delta,
        "singularity_threshold": traj.singularity_threshold,
    }
