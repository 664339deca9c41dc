"""Tests for the experiment-record CSV loader."""

import pytest

from collapsar.core.errors import DataError
from collapsar.data.records import RecordLoader


def _write(path, text):
    path.write_text(text, encoding="utf-8")
    return path


def test_load_required_columns(tmp_path):
    path = _write(
        tmp_path / "extra.csv",
        "name,tau_m_s,tau_E_s\n"
        "Atom interferometry,1e-3,1e-10\n"
        " Ion trap ,2e-6,5e-9\n",
    )
    records = RecordLoader().load(path)
    assert [r.name for r in records] == ["Atom interferometry", "Ion trap"]
    assert records[0].tau_m == 1e-3
    assert records[0].tau_E == 1e-10
    assert records[0].printed_r is None
    assert records[0].reference == ""


def test_optional_columns(tmp_path):
    path = _write(
        tmp_path / "extra.csv",
        "# hand-edited constraints\n"
        "name,tau_m_s,tau_E_s,printed_r,reference\n"
        "A,1e-3,1e-10,1e7,lab notes\n"
        "B,1e-3,1e-10,,\n",
    )
    a, b = RecordLoader().load(path)
    assert a.printed_r == 1e7
    assert a.reference == "lab notes"
    assert b.printed_r is None
    assert b.reference == ""


def test_missing_file(tmp_path):
    with pytest.raises(DataError, match="not found"):
        RecordLoader().load(tmp_path / "nope.csv")


def test_missing_column(tmp_path):
    path = _write(tmp_path / "bad.csv", "name,tau_m_s\nA,1e-3\n")
    with pytest.raises(DataError, match="tau_E_s"):
        RecordLoader().load(path)


def test_bad_value(tmp_path):
    path = _write(tmp_path / "bad.csv", "name,tau_m_s,tau_E_s\nA,soon,1e-10\n")
    with pytest.raises(DataError, match="row 0"):
        RecordLoader().load(path)


def test_non_positive_time_rejected(tmp_path):
    path = _write(tmp_path / "bad.csv", "name,tau_m_s,tau_E_s\nA,1e-3,0\n")
    with pytest.raises(DataError):
        RecordLoader().load(path)
