"""
CSV and JSON report files.

Floats are written with ``repr`` so a parsed report reproduces the records
exactly; an empty cell is a missing value.
"""

import csv
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Sequence, Tuple, Type, TypeVar

from pydantic import BaseModel

from ..data.models import SearchTrace, StiffnessRecord, WindowRecord
from ..errors import ConfigError

logger = logging.getLogger(__name__)

R = TypeVar("R", bound=BaseModel)

STIFFNESS_REPORT = "stiffness_report.csv"
WINDOW_REPORT = "window_report.csv"
STIFFNESS_COLUMNS = list(StiffnessRecord.model_fields)
WINDOW_COLUMNS = list(WindowRecord.model_fields)
TRACE_COLUMNS = [
    "step", "phase",
    "command_u", "command_z", "command_psi",
    "u", "z", "psi",
    "fx", "fy", "fz",
    "grip_fx", "grip_fy", "grip_fz",
    "max_contact_force", "contacts", "residual",
]
SAMPLE_COLUMNS = ["displacement", "velocity", "force"]


def _cell(value: Any) -> str:
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _write_rows(path: Path, columns: Sequence[str], rows: Sequence[Dict[str, Any]]) -> Path:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(columns)
        for row in rows:
            writer.writerow([_cell(row.get(column)) for column in columns])
    logger.info(f"Wrote {len(rows)} row(s) to {path}")
    return path


def write_records(path: Path, records: Sequence[BaseModel], columns: Sequence[str]) -> Path:
    """Write records in the given column order."""
    return _write_rows(path, columns, [r.model_dump() for r in records])


def read_records(path: Path, model: Type[R]) -> List[R]:
    """Parse a report written by ``write_records`` back into records."""
    fields = model.model_fields
    records = []
    with Path(path).open(newline="", encoding="utf-8") as handle:
        for row in csv.DictReader(handle):
            values = {}
            for name, text in row.items():
                if text == "" and fields[name].default is None:
                    values[name] = None
                else:
                    values[name] = text
            records.append(model.model_validate(values))
    return records


def write_stiffness_report(out_dir: Path, records: Sequence[StiffnessRecord]) -> Path:
    ordered = sorted(records, key=lambda r: r.sort_key)
    return write_records(Path(out_dir) / STIFFNESS_REPORT, ordered, STIFFNESS_COLUMNS)


def write_window_report(out_dir: Path, records: Sequence[WindowRecord]) -> Path:
    ordered = sorted(records, key=lambda r: r.sort_key)
    return write_records(Path(out_dir) / WINDOW_REPORT, ordered, WINDOW_COLUMNS)


# ============ Traces ============

def trace_to_rows(trace: SearchTrace) -> List[Dict[str, Any]]:
    """One flat row per trace sample: commanded pose, plug pose and forces."""
    rows = []
    for sample in trace.samples:
        rows.append({
            "step": sample.step,
            "phase": sample.phase.value,
            "command_u": sample.command[0],
            "command_z": sample.command[1],
            "command_psi": sample.command[2],
            "u": sample.pose[0],
            "z": sample.pose[1],
            "psi": sample.pose[2],
            "fx": sample.force[0],
            "fy": sample.force[1],
            "fz": sample.force[2],
            "grip_fx": sample.grip_force[0],
            "grip_fy": sample.grip_force[1],
            "grip_fz": sample.grip_force[2],
            "max_contact_force": sample.max_contact_force,
            "contacts": len(sample.contacts),
            "residual": sample.residual,
        })
    return rows


def write_trace(path: Path, trace: SearchTrace) -> Path:
    return _write_rows(Path(path), TRACE_COLUMNS, trace_to_rows(trace))


# ============ Viscoelastic samples ============

def read_samples(path: Path) -> List[Tuple[float, float, float]]:
    """
    (displacement, velocity, force) samples from a CSV with that header.

    Raises:
        ConfigError: if the file is missing or lacks a column
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"samples file not found: {path}")
    with path.open(newline="", encoding="utf-8") as handle:
        reader = csv.DictReader(handle)
        missing = [c for c in SAMPLE_COLUMNS if c not in (reader.fieldnames or [])]
        if missing:
            raise ConfigError(f"samples file {path} lacks column(s): {', '.join(missing)}")
        try:
            return [tuple(float(row[c]) for c in SAMPLE_COLUMNS) for row in reader]
        except ValueError as e:
            raise ConfigError(f"samples file {path}: {e}") from e


def write_samples(path: Path, samples: Sequence[Tuple[float, float, float]]) -> Path:
    rows = [dict(zip(SAMPLE_COLUMNS, sample)) for sample in samples]
    return _write_rows(Path(path), SAMPLE_COLUMNS, rows)


def write_json(path: Path, model: BaseModel) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(json.dumps(model.model_dump(mode="json"), indent=2, sort_keys=True) + "\n",
                    encoding="utf-8")
    logger.info(f"Wrote {path}")
    return path
