"""Run settings with Pydantic BaseSettings for env var support.

One flat model covers every subcommand so a run's resolved configuration
can be written out as a ``key = value`` manifest and replayed verbatim.
Precedence: defaults < COLLAPSAR_* environment < config file < CLI flags.
"""

from __future__ import annotations

import math
from pathlib import Path
from typing import Any, Optional

from pydantic import ValidationError, field_validator, model_validator
from pydantic_settings import BaseSettings

from collapsar.core.constants import (
    BINOMIAL_CONFIDENCE,
    CFL_SAFETY,
    CONVERGENCE_DELTA,
    DEFAULT_PROBE_PHASE,
    WINDOW_THRESHOLD,
)
from collapsar.core.errors import ConfigError, DataError

OUTPUT_FORMATS = ("csv", "json", "svg", "html")
DISTRIBUTIONS = ("uniform", "gaussian", "point")
INITIAL_STATES = ("symmetric", "gaussian", "plane")
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR")


def _parse_floats(text: str) -> list[float]:
    return [float(tok) for tok in text.split(",") if tok.strip()]


class RunSettings(BaseSettings):
    """Resolved configuration of one CLI run."""

    command: str = ""
    log_level: str = "INFO"
    out_dir: str = "out"
    formats: str = "csv,json"

    # physical constants and grid
    hbar: float = 1.0
    mass: float = 1.0
    n: int = 256
    x_min: float = -8.0
    x_max: float = 8.0

    # initial state
    initial: str = "symmetric"
    k: float = 1.0
    epsilon: float = 0.0
    sigma0: float = 1.0
    k0: float = 2.0
    x0: float = 0.0

    # collapse parameters and pointwise trajectory
    g: float = 1.0
    q: float = 1.0
    p0_re: float = 0.1
    p0_im: float = 0.0
    delta: float = CONVERGENCE_DELTA

    # time stepping; dt=None picks the explicit stability limit, t_max=None the
    # per-command default
    dt: Optional[float] = None
    t_max: Optional[float] = None
    snapshot_stride: int = 100
    safety: float = CFL_SAFETY

    # Born ensemble
    seed: int = 0
    trials: int = 10000
    epsilon_scale: float = 1e-8
    distribution: str = "uniform"
    probe_phase: float = DEFAULT_PROBE_PHASE
    mirror: bool = False
    verify_every: int = 100
    workers: int = 1
    confidence: float = BINOMIAL_CONFIDENCE

    # scaling sweep
    g_list: str = "0.1,0.316,1,3.16,10"
    q_list: str = "0.5,1,2"
    p0_ratio: float = 0.1
    scaling_delta: float = 0.01

    # constraints and equivalence
    records: Optional[str] = None
    factor: float = 3.0
    window_threshold: float = WINDOW_THRESHOLD

    model_config = {"env_prefix": "COLLAPSAR_"}

    @field_validator("log_level")
    @classmethod
    def _check_log_level(cls, v: str) -> str:
        v = v.upper()
        if v not in LOG_LEVELS:
            raise ValueError(f"must be one of {', '.join(LOG_LEVELS)}")
        return v

    @field_validator("formats")
    @classmethod
    def _check_formats(cls, v: str) -> str:
        items = [tok.strip().lower() for tok in v.split(",") if tok.strip()]
        bad = [tok for tok in items if tok not in OUTPUT_FORMATS]
        if bad or not items:
            raise ValueError(f"unknown format(s) {bad}; choose from {', '.join(OUTPUT_FORMATS)}")
        return ",".join(items)

    @field_validator("distribution")
    @classmethod
    def _check_distribution(cls, v: str) -> str:
        if v not in DISTRIBUTIONS:
            raise ValueError(f"must be one of {', '.join(DISTRIBUTIONS)}")
        return v

    @field_validator("initial")
    @classmethod
    def _check_initial(cls, v: str) -> str:
        if v not in INITIAL_STATES:
            raise ValueError(f"must be one of {', '.join(INITIAL_STATES)}")
        return v

    @field_validator("hbar", "mass", "k", "sigma0", "g", "q", "safety", "epsilon_scale", "factor")
    @classmethod
    def _check_positive(cls, v: float) -> float:
        if not (v > 0 and math.isfinite(v)):
            raise ValueError("must be a positive finite number")
        return v

    @field_validator("dt", "t_max")
    @classmethod
    def _check_optional_positive(cls, v: Optional[float]) -> Optional[float]:
        if v is not None and not v > 0:
            raise ValueError("must be positive")
        return v

    @field_validator("n")
    @classmethod
    def _check_n(cls, v: int) -> int:
        if v < 8:
            raise ValueError("must be at least 8")
        return v

    @field_validator("trials", "snapshot_stride", "verify_every", "workers")
    @classmethod
    def _check_count(cls, v: int) -> int:
        if v < 1:
            raise ValueError("must be at least 1")
        return v

    @field_validator("delta", "scaling_delta", "p0_ratio", "confidence", "window_threshold")
    @classmethod
    def _check_unit_interval(cls, v: float) -> float:
        if not 0 < v < 1:
            raise ValueError("must lie strictly between 0 and 1")
        return v

    @field_validator("probe_phase")
    @classmethod
    def _check_probe(cls, v: float) -> float:
        # k x_probe = pi * probe_phase must stay inside the node-free cell
        if not -0.5 < v < 0.5:
            raise ValueError("must lie strictly between -0.5 and 0.5 (units of pi)")
        return v

    @field_validator("g_list", "q_list")
    @classmethod
    def _check_list(cls, v: str) -> str:
        values = _parse_floats(v)
        if not values or any(not x > 0 for x in values):
            raise ValueError("must be a comma-separated list of positive numbers")
        return v

    @model_validator(mode="after")
    def _check_window(self) -> RunSettings:
        if not self.x_max > self.x_min:
            raise ValueError(f"x_max ({self.x_max}) must exceed x_min ({self.x_min})")
        return self

    @property
    def format_set(self) -> tuple[str, ...]:
        return tuple(self.formats.split(","))

    @property
    def g_values(self) -> list[float]:
        return _parse_floats(self.g_list)

    @property
    def q_values(self) -> list[float]:
        return _parse_floats(self.q_list)


def build_settings(**values: Any) -> RunSettings:
    """Construct RunSettings, turning validation failures into ConfigError."""
    try:
        return RunSettings(**values)
    except ValidationError as e:
        problems = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'settings'}: {err['msg']}"
            for err in e.errors()
        )
        raise ConfigError(f"Invalid settings: {problems}") from e


def read_config_file(file_path: str | Path) -> dict[str, str]:
    """Parse a flat ``key = value`` file; '#' starts a comment, blank values mean unset."""
    path = Path(file_path)
    if not path.exists():
        raise ConfigError(f"Config file not found: {path}")
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise DataError(f"Failed to read config file {path}: {e}") from e

    known = set(RunSettings.model_fields)
    values: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in known:
            raise ConfigError(f"{path}:{lineno}: unknown setting {key!r}")
        if value:
            values[key] = value
    return values


def _format_value(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def dump_settings(settings: RunSettings) -> str:
    """Manifest text: every field in declaration order, floats round-trip exact."""
    lines = ["# collapsar run manifest; replay with --config"]
    for name in RunSettings.model_fields:
        lines.append(f"{name} = {_format_value(getattr(settings, name))}")
    return "\n".join(lines) + "\n"
