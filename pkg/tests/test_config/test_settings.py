"""Tests for run settings and the key = value manifest format."""

import pytest

from collapsar.config.settings import RunSettings, build_settings, dump_settings, read_config_file
from collapsar.core.errors import ConfigError


def test_defaults():
    s = build_settings()
    assert s.hbar == 1.0
    assert s.mass == 1.0
    assert (s.x_min, s.x_max) == (-8.0, 8.0)
    assert s.dt is None
    assert s.t_max is None
    assert s.format_set == ("csv", "json")
    assert s.g_values == [0.1, 0.316, 1.0, 3.16, 10.0]
    assert s.q_values == [0.5, 1.0, 2.0]


def test_normalization():
    s = build_settings(log_level="debug", formats="CSV, svg")
    assert s.log_level == "DEBUG"
    assert s.format_set == ("csv", "svg")


@pytest.mark.parametrize(
    "values",
    [
        {"g": 0.0},
        {"hbar": -1.0},
        {"n": 4},
        {"trials": 0},
        {"delta": 1.5},
        {"probe_phase": 0.5},
        {"formats": "pdf"},
        {"distribution": "cauchy"},
        {"initial": "square"},
        {"log_level": "LOUD"},
        {"x_min": 1.0, "x_max": -1.0},
        {"g_list": "1,-2"},
        {"dt": 0.0},
    ],
)
def test_invalid_values_raise_config_error(values):
    with pytest.raises(ConfigError, match="Invalid settings"):
        build_settings(**values)


def test_environment_override(monkeypatch):
    monkeypatch.setenv("COLLAPSAR_G", "2.5")
    monkeypatch.setenv("COLLAPSAR_TRIALS", "40")
    s = RunSettings()
    assert s.g == 2.5
    assert s.trials == 40
    # explicit values still win
    assert build_settings(g=7.0).g == 7.0


def test_read_config_file(tmp_path):
    path = tmp_path / "run.cfg"
    path.write_text("# comment\n\ng = 3.0  # coupling\nrecords =\nseed=9\n", encoding="utf-8")
    assert read_config_file(path) == {"g": "3.0", "seed": "9"}


def test_read_config_file_errors(tmp_path):
    with pytest.raises(ConfigError, match="not found"):
        read_config_file(tmp_path / "missing.cfg")

    unknown = tmp_path / "unknown.cfg"
    unknown.write_text("gravity = 9.8\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="unknown setting"):
        read_config_file(unknown)

    malformed = tmp_path / "malformed.cfg"
    malformed.write_text("g 3.0\n", encoding="utf-8")
    with pytest.raises(ConfigError, match="malformed.cfg:1"):
        read_config_file(malformed)


def test_manifest_replays_exactly(tmp_path):
    original = build_settings(command="born", g=0.1 + 0.2, seed=17, mirror=True, dt=1e-5)
    path = tmp_path / "manifest.cfg"
    path.write_text(dump_settings(original), encoding="utf-8")
    replayed = build_settings(**read_config_file(path))
    assert replayed == original
    assert replayed.g == 0.1 + 0.2
    assert replayed.t_max is None
