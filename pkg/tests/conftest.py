"""Shared test fixtures."""

from __future__ import annotations

import pytest

from collapsar.config.experiments import ExperimentRegistry
from collapsar.core.types import CollapseParams, InitialState, PhysicalConstants, SpatialGrid


@pytest.fixture
def constants():
    return PhysicalConstants()


@pytest.fixture
def unit_params():
    """g = q = 1, so tau_c = 1."""
    return CollapseParams(g=1.0, q=1.0)


@pytest.fixture
def symmetric_state():
    return InitialState(k=1.0)


@pytest.fixture
def box_grid():
    """[-10, 10] with 256 nodes."""
    return SpatialGrid(-10.0, 10.0, 256)


@pytest.fixture
def experiment_registry():
    return ExperimentRegistry()


@pytest.fixture(autouse=True)
def _isolate_env(monkeypatch):
    """Keep COLLAPSAR_* variables from the developer's shell out of the tests."""
    import os

    for key in list(os.environ):
        if key.startswith("COLLAPSAR_"):
            monkeypatch.delenv(key)
