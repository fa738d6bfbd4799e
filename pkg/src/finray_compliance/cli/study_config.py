"""
Study configuration: one JSON document describing materials, designs, grids
and insertion scenarios.
"""

import itertools
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

from pydantic import BaseModel, ConfigDict, Field, ValidationError, model_validator

from ..data.materials import resolve_material
from ..data.models import (
    Axis,
    CalibrationAnchor,
    Envelope,
    FingerDesign,
    Fingertip,
    InsertionScenario,
    MaterialModel,
    PrintParameters,
    SolverSettings,
    StiffnessMatrix,
    StrategyParams,
)
from ..data.reference import MEASURED_KXX, measured_kyy
from ..errors import ConfigError, UnknownEntityError

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1


class DesignSpec(BaseModel):
    """Design point; material by registry name."""

    model_config = ConfigDict(extra="forbid")

    infill_direction: float = Field(0.0, ge=0, le=40)
    infill_density: float = Field(0.1, gt=0, le=1)
    material: str = "PLA+"
    fingertip: Fingertip = Fingertip.NOTCHED_CONTACT_PLANE
    mount_angle: float = 10.0
    notch_width: Optional[float] = Field(None, gt=0)


class GridSpec(BaseModel):
    """
    Cartesian design grid plus explicit points.

    The cartesian part is used when both direction and density lists are
    given; material, fingertip and mount angle default to one value each.
    """

    model_config = ConfigDict(extra="forbid")

    infill_direction: List[float] = Field(default_factory=list)
    infill_density: List[float] = Field(default_factory=list)
    material: List[str] = Field(default_factory=lambda: ["PLA+"])
    fingertip: List[Fingertip] = Field(default_factory=lambda: [Fingertip.NOTCHED_CONTACT_PLANE])
    mount_angle: List[float] = Field(default_factory=lambda: [10.0])
    points: List[DesignSpec] = Field(default_factory=list)

    def expand(self) -> List[DesignSpec]:
        specs = []
        if self.infill_direction and self.infill_density:
            for material, direction, density, tip, mount in itertools.product(
                self.material, self.infill_direction, self.infill_density,
                self.fingertip, self.mount_angle,
            ):
                specs.append(DesignSpec(
                    material=material,
                    infill_direction=direction,
                    infill_density=density,
                    fingertip=tip,
                    mount_angle=mount,
                ))
        specs.extend(self.points)
        return specs


class CalibrationSpec(BaseModel):
    """Anchor cell of a material; the measured kyy defaults to the bench table."""

    model_config = ConfigDict(extra="forbid")

    infill_direction: float = Field(0.0, ge=0, le=40)
    infill_density: float = Field(0.1, gt=0, le=1)
    fingertip: Optional[Fingertip] = None
    mount_angle: Optional[float] = None
    measured_kyy: Optional[float] = Field(None, gt=0)


class ScenarioSpec(InsertionScenario):
    """
    Insertion scenario template.

    The grip compliance is optional here: when absent it is identified from
    the design the scenario is run with.
    """

    design: Optional[str] = None
    axis: Axis = Axis.Y
    step: float = Field(0.5, gt=0)
    strategy: StrategyParams = Field(default_factory=StrategyParams)
    grip_compliance: Optional[StiffnessMatrix] = None

    def scenario_fields(self) -> Dict[str, Any]:
        """InsertionScenario keyword arguments without the compliance."""
        return self.model_dump(exclude={"design", "axis", "step", "strategy", "grip_compliance"})

    def build(self, compliance: Optional[StiffnessMatrix] = None) -> InsertionScenario:
        """
        Concrete scenario with a grip compliance.

        Raises:
            ConfigError: if neither the argument nor the template gives a compliance
        """
        compliance = compliance or self.grip_compliance
        if compliance is None:
            raise ConfigError("scenario has no grip_compliance and no design to identify it from")
        return InsertionScenario(**self.scenario_fields(), grip_compliance=compliance)


class StudyConfig(BaseModel):
    """Top-level study document."""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    schema_version: int = SCHEMA_VERSION
    materials: Dict[str, Dict[str, float]] = Field(default_factory=dict)
    print_params: PrintParameters = Field(default_factory=PrintParameters, alias="print")
    envelope: Envelope = Field(default_factory=Envelope)
    solver: SolverSettings = Field(default_factory=SolverSettings)
    calibration: Dict[str, CalibrationSpec] = Field(default_factory=dict)
    kxx_lumped: float = Field(MEASURED_KXX, gt=0)
    designs: Dict[str, DesignSpec] = Field(default_factory=dict)
    grid: GridSpec = Field(default_factory=GridSpec)
    scenarios: Dict[str, ScenarioSpec] = Field(default_factory=dict)
    output_dir: str = "results"
    seed: int = 0

    @model_validator(mode="after")
    def _check_references(self) -> "StudyConfig":
        if self.schema_version != SCHEMA_VERSION:
            raise ValueError(
                f"unsupported schema_version {self.schema_version}, expected {SCHEMA_VERSION}"
            )
        names = {spec.material for spec in self.designs.values()}
        names.update(spec.material for spec in self.grid.expand())
        names.update(self.calibration)
        for name in sorted(names):
            # raises UnknownMaterialError, which pydantic lets through
            resolve_material(name, self.materials)
        for scenario_id, scenario in self.scenarios.items():
            if scenario.design is not None and scenario.design not in self.designs:
                raise ValueError(f"scenario {scenario_id} names unknown design {scenario.design}")
        return self

    # ============ Lookups ============

    def material(self, name: str) -> MaterialModel:
        return resolve_material(name, self.materials)

    def finger_design(self, spec: DesignSpec) -> FingerDesign:
        """Concrete design with the study's print parameters and envelope."""
        fields = {
            "infill_direction": spec.infill_direction,
            "infill_density": spec.infill_density,
            "fingertip": spec.fingertip,
            "mount_angle": spec.mount_angle,
            "material": self.material(spec.material),
            "print": self.print_params,
            "envelope": self.envelope,
        }
        if spec.notch_width is not None:
            fields["notch_width"] = spec.notch_width
        return FingerDesign(**fields)

    def design(self, design_id: str) -> FingerDesign:
        """
        Named design.

        Raises:
            UnknownEntityError: if no design has that id
        """
        if design_id not in self.designs:
            raise UnknownEntityError(
                f"Design '{design_id}' not found. Available: {', '.join(sorted(self.designs)) or 'none'}"
            )
        return self.finger_design(self.designs[design_id])

    def scenario(self, scenario_id: str) -> ScenarioSpec:
        """
        Named scenario.

        Raises:
            UnknownEntityError: if no scenario has that id
        """
        if scenario_id not in self.scenarios:
            raise UnknownEntityError(
                f"Scenario '{scenario_id}' not found. "
                f"Available: {', '.join(sorted(self.scenarios)) or 'none'}"
            )
        return self.scenarios[scenario_id]

    def grid_designs(self) -> List[Tuple[str, FingerDesign]]:
        """Expanded grid as (id, design), duplicates dropped, sorted like the report."""
        seen = {}
        for spec in self.grid.expand():
            design = self.finger_design(spec)
            seen.setdefault(design.label, design)
        return sorted(
            seen.items(),
            key=lambda item: (
                item[1].material.name,
                item[1].infill_direction,
                item[1].infill_density,
                item[1].fingertip.value,
                item[1].mount_angle,
                item[0],
            ),
        )

    def anchors(self) -> Dict[str, CalibrationAnchor]:
        """
        Calibration anchor per material.

        Raises:
            ConfigError: if an anchor has neither a measured kyy nor a bench value
        """
        anchors = {}
        for name, spec in sorted(self.calibration.items()):
            kyy = spec.measured_kyy
            if kyy is None:
                kyy = measured_kyy(name, spec.infill_direction, spec.infill_density)
            if kyy is None:
                raise ConfigError(
                    f"calibration of {name} needs measured_kyy: no bench value for "
                    f"{spec.infill_direction:g} deg / {spec.infill_density:g}"
                )
            anchors[name] = CalibrationAnchor(
                infill_direction=spec.infill_direction,
                infill_density=spec.infill_density,
                fingertip=spec.fingertip,
                mount_angle=spec.mount_angle,
                measured_kyy=kyy,
            )
        return anchors


def load_study_config(path: Union[str, Path]) -> StudyConfig:
    """
    Read and validate a study config.

    Raises:
        ConfigError: if the file is missing, not JSON or fails validation
        UnknownMaterialError: if a referenced material cannot be resolved
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file not found: {path}")
    try:
        document = json.loads(path.read_text(encoding="utf-8"))
    except (OSError, json.JSONDecodeError) as e:
        raise ConfigError(f"cannot read config {path}: {e}") from e
    try:
        config = StudyConfig.model_validate(document)
    except ValidationError as e:
        raise ConfigError(f"invalid config {path}: {e}") from e
    logger.info(
        f"Loaded study config {path}: {len(config.designs)} design(s), "
        f"{len(config.scenarios)} scenario(s)"
    )
    return config


def study_schema() -> Dict[str, Any]:
    """Published JSON schema of the study document."""
    return StudyConfig.model_json_schema(by_alias=True)
