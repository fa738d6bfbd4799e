"""
Tests for the CSV and JSON report files.
"""

import csv
import json

import pytest

from finray_compliance.cli.reports import (
    STIFFNESS_COLUMNS,
    STIFFNESS_REPORT,
    TRACE_COLUMNS,
    WINDOW_COLUMNS,
    read_records,
    read_samples,
    trace_to_rows,
    write_json,
    write_samples,
    write_stiffness_report,
    write_trace,
    write_window_report,
)
from finray_compliance.data.models import (
    Axis,
    DesignRow,
    FingerDesign,
    StiffnessRecord,
    ViscoelasticFit,
    WindowRecord,
)
from finray_compliance.errors import ConfigError
from finray_compliance.insertion.simulate import simulate_insert


def header(path) -> list:
    with path.open(newline="", encoding="utf-8") as handle:
        return next(csv.reader(handle))


@pytest.fixture
def columns(design):
    return DesignRow.columns_of("pla_0deg_10pct", design)


class TestStiffnessReport:
    def test_round_trip_keeps_values_and_blanks(self, tmp_path, columns):
        ok = StiffnessRecord(
            **columns,
            kyy=1.2000000000000002,
            kzz=41.7,
            kzy=1.9,
            kxx=2.9,
            ratio=34.75,
            rcc_angle_deg=2.7,
            max_force=26.0,
            max_deflection=21.3,
            failure_mode="yield",
            kyy_measured=1.2,
            kyy_deviation=1.8e-16,
        )
        failed = StiffnessRecord(
            **{**columns, "design_id": "pla_0deg_10pct_b"}, status="failed", error_code="SOLVER_DIVERGED"
        )
        path = write_stiffness_report(tmp_path, [failed, ok])
        assert path.name == STIFFNESS_REPORT
        assert header(path) == STIFFNESS_COLUMNS
        assert read_records(path, StiffnessRecord) == [ok, failed]

    def test_header_only_when_empty(self, tmp_path):
        path = write_stiffness_report(tmp_path, [])
        assert path.read_text(encoding="utf-8").splitlines() == [",".join(STIFFNESS_COLUMNS)]


class TestWindowReport:
    def test_rows_sorted_by_design(self, tmp_path, pla):
        petg = pla.model_copy(update={"name": "PETG"})
        rows = [
            WindowRecord(**DesignRow.columns_of("b", FingerDesign(material=pla)), window_mm=5.5),
            WindowRecord(**DesignRow.columns_of("a", FingerDesign(material=petg)), window_mm=7.5),
        ]
        path = write_window_report(tmp_path, rows)
        assert header(path) == WINDOW_COLUMNS
        parsed = read_records(path, WindowRecord)
        assert [r.design_id for r in parsed] == ["a", "b"]
        assert parsed[0].min_offset is None
        assert parsed[1].window_mm == 5.5


class TestTrace:
    def test_rows_follow_samples(self, tmp_path, scenario):
        trace = simulate_insert(scenario(misalignment=(0.0, 20.0)), axis=Axis.Y)
        rows = trace_to_rows(trace)
        assert len(rows) == len(trace.samples)
        assert list(rows[0]) == TRACE_COLUMNS
        assert rows[0]["phase"] == "approach"

        path = write_trace(tmp_path / "trace.csv", trace)
        assert header(path) == TRACE_COLUMNS
        assert len(path.read_text(encoding="utf-8").splitlines()) == len(rows) + 1


class TestSamples:
    def test_write_then_read(self, tmp_path):
        samples = [(0.1, 10.0, 0.695), (0.2, 10.0, 0.84), (0.3, 20.0, 1.535)]
        path = write_samples(tmp_path / "samples.csv", samples)
        assert read_samples(path) == samples

    def test_missing_column(self, tmp_path):
        path = tmp_path / "samples.csv"
        path.write_text("displacement,force\n0.1,0.2\n", encoding="utf-8")
        with pytest.raises(ConfigError, match="velocity"):
            read_samples(path)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError):
            read_samples(tmp_path / "absent.csv")

    def test_non_numeric_cell(self, tmp_path):
        path = tmp_path / "samples.csv"
        path.write_text("displacement,velocity,force\n0.1,fast,0.2\n", encoding="utf-8")
        with pytest.raises(ConfigError):
            read_samples(path)


def test_write_json(tmp_path):
    path = write_json(tmp_path / "nested" / "fit.json", ViscoelasticFit(k=1.45, b=0.055, residual_rms=0.0))
    assert json.loads(path.read_text(encoding="utf-8")) == {"b": 0.055, "k": 1.45, "residual_rms": 0.0}
