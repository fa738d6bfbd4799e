"""
Tests for the finray command line: exit codes and written files.
"""

import csv
import json

import pytest

from finray_compliance.cli.reports import STIFFNESS_COLUMNS
from finray_compliance.main import main
from finray_compliance.utils.config import reset_config

pytestmark = pytest.mark.usefixtures("clean_env")

GRIP = {"kxx": 2.9, "kyy": 1.2, "kzz": 40.0}


class TestUsage:
    def test_no_command(self):
        assert main([]) == 1

    def test_missing_required_option(self):
        assert main(["design"]) == 1

    def test_command_needs_config(self, tmp_path):
        assert main(["characterize", "--out", str(tmp_path)]) == 1

    def test_invalid_json(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{", encoding="utf-8")
        assert main(["characterize", "--config", str(path)]) == 1

    def test_config_from_environment(self, monkeypatch, tmp_path):
        monkeypatch.setenv("FINRAY_CONFIG", str(tmp_path / "absent.json"))
        reset_config()
        assert main(["characterize", "--out", str(tmp_path)]) == 1


class TestUnknownEntities:
    def test_unknown_design(self, write_config, tmp_path):
        path = write_config({"designs": {"d": {}}})
        assert main(["design", "--id", "nope", "--config", str(path), "--out", str(tmp_path)]) == 2

    def test_unknown_material(self, write_config, tmp_path):
        path = write_config({"designs": {"d": {"material": "Unobtainium"}}})
        assert main(["design", "--id", "d", "--config", str(path), "--out", str(tmp_path)]) == 2

    def test_unknown_scenario(self, write_config, tmp_path):
        path = write_config({})
        assert main(["simulate", "--scenario", "s", "--config", str(path), "--out", str(tmp_path)]) == 2


class TestCommands:
    def test_schema(self, capsys):
        assert main(["schema"]) == 0
        schema = json.loads(capsys.readouterr().out)
        assert "designs" in schema["properties"]

    def test_design_writes_svg_and_stl(self, write_config, tmp_path):
        path = write_config({"designs": {"d": {"infill_density": 0.2}}})
        out = tmp_path / "out"
        assert main(["design", "--id", "d", "--config", str(path), "--out", str(out)]) == 0
        assert (out / "d_frame.svg").read_text(encoding="utf-8").count("<polyline") > 0
        assert (out / "d.stl").stat().st_size > 84

    def test_characterize_empty_grid(self, write_config, tmp_path):
        path = write_config({})
        out = tmp_path / "out"
        assert main(["characterize", "--config", str(path), "--out", str(out)]) == 0
        with (out / "stiffness_report.csv").open(newline="", encoding="utf-8") as handle:
            assert list(csv.reader(handle)) == [STIFFNESS_COLUMNS]

    def test_fit_visco_without_config(self, tmp_path):
        assert main(["fit-visco", "--out", str(tmp_path)]) == 0
        fit = json.loads((tmp_path / "visco_fit.json").read_text(encoding="utf-8"))
        assert fit["k"] == pytest.approx(1.45, rel=1e-6)
        assert fit["b"] == pytest.approx(0.055, rel=1e-6)
        assert (tmp_path / "visco_samples.csv").is_file()

    def test_fit_visco_from_samples(self, tmp_path):
        samples = tmp_path / "ramps.csv"
        samples.write_text(
            "displacement,velocity,force\n"
            "1.0,10.0,1.5\n2.0,10.0,2.5\n1.0,20.0,2.0\n2.0,20.0,3.0\n",
            encoding="utf-8",
        )
        out = tmp_path / "out"
        assert main(["fit-visco", "--samples", str(samples), "--out", str(out)]) == 0
        fit = json.loads((out / "visco_fit.json").read_text(encoding="utf-8"))
        # force = 1.0 * x + 0.05 * v exactly
        assert fit["k"] == pytest.approx(1.0)
        assert fit["b"] == pytest.approx(0.05)
        assert not (out / "visco_samples.csv").exists()

    def test_simulate_writes_trace(self, write_config, tmp_path):
        path = write_config({
            "scenarios": {"s": {"grip_compliance": GRIP, "misalignment": [0.0, 20.0]}}
        })
        out = tmp_path / "out"
        assert main(["simulate", "--scenario", "s", "--config", str(path), "--out", str(out)]) == 0
        with (out / "trace_s.csv").open(newline="", encoding="utf-8") as handle:
            rows = list(csv.DictReader(handle))
        assert rows
        assert {row["phase"] for row in rows} >= {"approach", "insert_z"}
        assert (out / "trace_s.svg").read_text(encoding="utf-8").startswith("<?xml")

    def test_simulate_offset_flag(self, write_config, tmp_path):
        path = write_config({"scenarios": {"s": {"grip_compliance": GRIP}}})
        out = tmp_path / "out"
        argv = ["simulate", "--scenario", "s", "--offset", "-20", "--axis", "x"]
        assert main(argv + ["--config", str(path), "--out", str(out)]) == 0
        assert (out / "trace_s.csv").is_file()

    def test_sweep_without_designs(self, write_config, tmp_path):
        path = write_config({"scenarios": {"s": {"grip_compliance": GRIP}}})
        assert main(["sweep", "--scenario", "s", "--config", str(path), "--out", str(tmp_path)]) == 1


class TestDeterminism:
    STUDY = {
        "calibration": {"PLA+": {"infill_direction": 0.0, "infill_density": 0.1}},
        "designs": {"d": {"infill_density": 0.1}},
        "grid": {"material": ["PLA+"], "infill_direction": [0.0, 20.0], "infill_density": [0.1, 0.2]},
        "scenarios": {"s": {"design": "d", "step": 1.0}},
    }

    def run_twice(self, argv, path, tmp_path):
        outputs = []
        for run in ("first", "second"):
            out = tmp_path / run
            assert main(argv + ["--config", str(path), "--out", str(out)]) == 0
            outputs.append(out)
        return outputs

    def test_characterize_rerun_is_byte_identical(self, write_config, tmp_path):
        path = write_config(self.STUDY)
        first, second = self.run_twice(["characterize"], path, tmp_path)
        report = "stiffness_report.csv"
        assert (first / report).read_bytes() == (second / report).read_bytes()

    def test_sweep_rerun_is_byte_identical(self, write_config, tmp_path):
        study = {**self.STUDY, "grid": {}}
        path = write_config(study)
        first, second = self.run_twice(["sweep", "--scenario", "s"], path, tmp_path)
        report = "window_report.csv"
        assert (first / report).read_bytes() == (second / report).read_bytes()
        svg = "d_y_trajectory.svg"
        assert (first / svg).read_bytes() == (second / svg).read_bytes()
