"""Figures for collapse runs using Plotly."""

from __future__ import annotations

from typing import Optional

import numpy as np
import pandas as pd
import plotly.graph_objects as go
from plotly.subplots import make_subplots

from collapsar.core.types import CollapseTrajectory, ComplexField
from collapsar.experiments.equivalence import EquivalenceReport
from collapsar.experiments.scaling import ScalingFit

TEMPLATE = "plotly_white"


def plot_trajectory(traj: CollapseTrajectory, title: str = "Collapse trajectory") -> go.Figure:
    """Re p(t) and Im p(t), with the outcomes +-q marked."""
    fig = go.Figure()
    fig.add_trace(
        go.Scatter(x=traj.times, y=traj.p_values.real, mode="lines", name="Re p", line=dict(color="#2196F3", width=1.5))
    )
    fig.add_trace(
        go.Scatter(x=traj.times, y=traj.p_values.imag, mode="lines", name="Im p", line=dict(color="#F44336", width=1))
    )
    if traj.params is not None:
        for level in (traj.params.q, -traj.params.q):
            fig.add_hline(y=level, line=dict(color="gray", dash="dot", width=1))
    fig.update_layout(title=title, xaxis_title="t", yaxis_title="p", template=TEMPLATE)
    return fig


def plot_snapshots(
    fields: list[tuple[float, ComplexField]],
    title: str = "|psi(x, t)|",
) -> go.Figure:
    """|psi| against x, one line per snapshot time."""
    fig = go.Figure()
    for t, psi in fields:
        fig.add_trace(go.Scatter(x=psi.x, y=np.abs(psi.values), mode="lines", name=f"t={t:.4g}"))
    fig.update_layout(title=title, xaxis_title="x", yaxis_title="|psi|", template=TEMPLATE)
    return fig


def plot_potential(curve: pd.DataFrame, q: float, title: Optional[str] = None) -> go.Figure:
    """Double-well V_c(p) above the cubic F_c(p), sharing the p axis."""
    fig = make_subplots(
        rows=2,
        cols=1,
        shared_xaxes=True,
        vertical_spacing=0.08,
        subplot_titles=["Collapsing potential V_c(p)", "Collapsing force F_c(p)"],
    )
    fig.add_trace(
        go.Scatter(x=curve["p"], y=curve["v_c"], mode="lines", name="V_c", line=dict(color="#2196F3", width=1.5)),
        row=1,
        col=1,
    )
    fig.add_trace(
        go.Scatter(x=curve["p"], y=curve["f_c"], mode="lines", name="F_c", line=dict(color="#F44336", width=1.5)),
        row=2,
        col=1,
    )
    for x in (-q, q):
        fig.add_vline(x=x, line=dict(color="gray", dash="dot", width=1))
    fig.update_layout(title=title or f"Collapse landscape (q={q:g})", height=600, template=TEMPLATE)
    fig.update_xaxes(title_text="p", row=2, col=1)
    return fig


def plot_scaling(fit: ScalingFit) -> go.Figure:
    """log-log t_c against g q^2 with the fitted line."""
    rates = np.array([p.rate for p in fit.points])
    t_c = np.array([p.t_c for p in fit.points])
    line_x = np.geomspace(rates.min(), rates.max(), 50)
    line_y = np.exp(fit.intercept) * line_x**fit.slope
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=rates, y=t_c, mode="markers", name="measured t_c"))
    fig.add_trace(go.Scatter(x=line_x, y=line_y, mode="lines", name=f"slope {fit.slope:.4f}"))
    fig.update_layout(title="Collapse-time scaling", template=TEMPLATE)
    fig.update_xaxes(type="log", title_text="g q^2")
    fig.update_yaxes(type="log", title_text="t_c")
    return fig


def plot_equivalence(report: EquivalenceReport) -> go.Figure:
    fig = go.Figure()
    for r in report.results:
        fig.add_trace(go.Scatter(x=r.times, y=r.snapshot_discrepancy, mode="lines+markers", name=r.label))
    fig.update_layout(title="CQHJ vs reference discrepancy", xaxis_title="t", template=TEMPLATE)
    fig.update_yaxes(type="log", title_text="max |dp| / max |p_ref|")
    return fig
