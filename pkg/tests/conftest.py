"""
Shared fixtures: materials, simple reference frames and insertion scenarios.
"""

import json
from pathlib import Path
from typing import Callable, Optional

import pytest

from finray_compliance.data.materials import builtin_material
from finray_compliance.data.models import (
    FingerDesign,
    FrameElement,
    InsertionScenario,
    MaterialModel,
    PlanarFrame,
    SectionProperties,
    StiffnessMatrix,
    StrategyParams,
)
from finray_compliance.utils.config import reset_config

REPO_ROOT = Path(__file__).resolve().parents[1]

# Transverse and axial grip stiffness of the calibrated 0 deg / 10 % finger
BENCH_COMPLIANCE = StiffnessMatrix(kxx=2.9, kyy=1.2, kzz=40.0)


def rectangle(thickness: float, depth: float) -> SectionProperties:
    return SectionProperties(
        thickness=thickness,
        depth=depth,
        area=thickness * depth,
        second_moment=depth * thickness ** 3 / 12.0,
    )


@pytest.fixture
def pla() -> MaterialModel:
    return builtin_material("PLA+")


@pytest.fixture
def design(pla) -> FingerDesign:
    """Default 0 deg / 10 % PLA+ finger."""
    return FingerDesign(material=pla)


@pytest.fixture
def cantilever(pla) -> Callable[..., PlanarFrame]:
    """
    Factory for a straight cantilever along +z, clamped at node 0.

    The tip is the last node.
    """
    def build(
        length: float = 100.0,
        thickness: float = 1.0,
        depth: float = 10.0,
        elements: int = 1,
        material: Optional[MaterialModel] = None,
    ) -> PlanarFrame:
        material = material or pla
        section = rectangle(thickness, depth)
        nodes = [(0.0, length * k / elements) for k in range(elements + 1)]
        return PlanarFrame(
            nodes=nodes,
            elements=[
                FrameElement(node_i=k, node_j=k + 1, section=section, material=material)
                for k in range(elements)
            ],
            supports=[0],
            tip_node=elements,
            label="cantilever",
        )

    return build


@pytest.fixture
def scenario() -> Callable[..., InsertionScenario]:
    """Factory for a 10 x 12 mm plug over a 5 mm deep running-fit socket."""
    def build(**overrides) -> InsertionScenario:
        fields = {"grip_compliance": BENCH_COMPLIANCE}
        fields.update(overrides)
        return InsertionScenario(**fields)

    return build


@pytest.fixture
def strategy() -> StrategyParams:
    return StrategyParams()


@pytest.fixture
def clean_env(monkeypatch):
    """Process config rebuilt from an environment without finray variables."""
    for name in ("FINRAY_CONFIG", "FINRAY_OUTPUT_DIR", "FINRAY_JOBS", "FINRAY_LOG_LEVEL"):
        monkeypatch.delenv(name, raising=False)
    reset_config()
    yield
    reset_config()


@pytest.fixture
def write_config(tmp_path) -> Callable[[dict], Path]:
    def write(document: dict, name: str = "study.json") -> Path:
        path = tmp_path / name
        path.write_text(json.dumps(document), encoding="utf-8")
        return path

    return write
