"""
Data models for finger designs, frames, solver results, identified stiffness
and insertion scenarios.

Units are fixed throughout: mm, N, MPa, deg, s.
"""

import math
from enum import Enum
from typing import Dict, List, Optional, Tuple

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator


# ============ Enumerations ============

class Fingertip(str, Enum):
    ROUNDED = "rounded"
    FLAT = "flat"
    NOTCHED_ROUNDED = "notched_rounded"
    FLAT_ANGLED = "flat_angled"
    NOTCHED_CONTACT_PLANE = "notched_contact_plane"

    @property
    def is_notched(self) -> bool:
        return self in (Fingertip.NOTCHED_ROUNDED, Fingertip.NOTCHED_CONTACT_PLANE)


class MemberRole(str, Enum):
    WALL = "wall"
    RIB = "rib"
    TIP = "tip"
    RIGID = "rigid"


class SolveStatus(str, Enum):
    CONVERGED = "converged"
    BUCKLED = "buckled"
    YIELDED = "yielded"
    DIVERGED = "diverged"


class FailureMode(str, Enum):
    YIELD = "yield"
    BUCKLING = "buckling"


class ConnectorFit(str, Enum):
    PRESS = "press"
    RUNNING = "running"
    TRANSITION = "transition"


class Gland(str, Enum):
    STRAIGHT = "straight"
    RIGHT_ANGLE = "right_angle"


class Locking(str, Enum):
    CLIP = "clip"
    LEVER = "lever"
    NONE = "none"


class SearchPhase(str, Enum):
    APPROACH = "approach"
    SLIDE_X = "slide_x"
    SLIDE_Y = "slide_y"
    INSERT_Z = "insert_z"


PHASE_ORDER = [SearchPhase.APPROACH, SearchPhase.SLIDE_X, SearchPhase.SLIDE_Y, SearchPhase.INSERT_Z]


class Outcome(str, Enum):
    SUCCESS = "success"
    JAMMED = "jammed"
    MISSED = "missed"
    OVERFORCE = "overforce"


class Axis(str, Enum):
    X = "x"
    Y = "y"


# ============ Material and print models ============

class MaterialModel(BaseModel):
    """Isotropic filament material."""
    model_config = ConfigDict(frozen=True)

    name: str
    youngs_modulus: float = Field(gt=0)
    yield_strength: float = Field(gt=0)
    ultimate_strength: float = Field(gt=0)
    poisson_ratio: float = Field(ge=0, lt=0.5)
    density: float = Field(gt=0)
    calibration_scale: float = Field(1.0, gt=0)
    calibrated: bool = False

    @model_validator(mode="after")
    def _check_strengths(self) -> "MaterialModel":
        if self.yield_strength > self.ultimate_strength:
            raise ValueError(
                f"yield_strength {self.yield_strength} exceeds "
                f"ultimate_strength {self.ultimate_strength}"
            )
        return self

    def scaled(self, factor: float) -> "MaterialModel":
        """Copy with the elastic modulus multiplied by ``factor``."""
        return self.model_copy(update={
            "youngs_modulus": self.youngs_modulus * factor,
            "calibration_scale": self.calibration_scale * factor,
        })


class PrintParameters(BaseModel):
    """Slicer settings that decide the beam sections."""
    model_config = ConfigDict(frozen=True)

    line_width: float = Field(0.4, gt=0)
    wall_line_count: int = Field(2, ge=1)
    layer_depth: float = Field(15.0, gt=0)

    @property
    def wall_thickness(self) -> float:
        return self.wall_line_count * self.line_width


class SectionProperties(BaseModel):
    """Rectangular beam section: in-plane thickness by out-of-plane depth."""
    model_config = ConfigDict(frozen=True)

    thickness: float = Field(gt=0)
    depth: float = Field(gt=0)
    area: float = Field(gt=0)
    second_moment: float = Field(gt=0)


class Envelope(BaseModel):
    """Outer finger dimensions in the finger's own frame."""
    model_config = ConfigDict(frozen=True)

    height: float = Field(80.0, gt=0)
    base_width: float = Field(25.0, gt=0)
    depth: float = Field(15.0, gt=0)
    tip_width: float = Field(20.0, gt=0)
    base_height: float = Field(10.0, gt=0)
    tip_height: float = Field(4.0, gt=0)
    notch_depth: float = Field(1.0, gt=0)

    @model_validator(mode="after")
    def _check_proportions(self) -> "Envelope":
        if self.base_height >= self.height:
            raise ValueError("base_height must be below the finger height")
        return self

    @property
    def usable_height(self) -> float:
        return self.height - self.base_height


class FingerDesign(BaseModel):
    """One point of the finger design space."""
    model_config = ConfigDict(frozen=True, populate_by_name=True)

    infill_direction: float = Field(0.0, ge=0, le=40)
    infill_density: float = Field(0.1, gt=0, le=1)
    fingertip: Fingertip = Fingertip.NOTCHED_CONTACT_PLANE
    notch_width: float = Field(4.0, ge=0)
    mount_angle: float = Field(10.0, ge=-45, le=45)
    material: MaterialModel
    print_params: PrintParameters = Field(default_factory=PrintParameters, alias="print")
    envelope: Envelope = Field(default_factory=Envelope)

    @model_validator(mode="after")
    def _check_notch(self) -> "FingerDesign":
        if self.fingertip.is_notched and self.notch_width <= 0:
            raise ValueError("notch_width must be positive for notched fingertips")
        return self

    @property
    def label(self) -> str:
        return (
            f"{self.material.name}_{self.infill_direction:g}deg_"
            f"{self.infill_density * 100:g}pct_{self.fingertip.value}_m{self.mount_angle:g}"
        )


class FingertipContact(BaseModel):
    """Contact surface abstraction of a fingertip option."""
    model_config = ConfigDict(frozen=True)

    contact_plane_angle: float
    contact_half_width: float = Field(gt=0)
    friction_mu: float = Field(ge=0)


# ============ Frame models ============

class FrameElement(BaseModel):
    model_config = ConfigDict(frozen=True)

    node_i: int = Field(ge=0)
    node_j: int = Field(ge=0)
    section: SectionProperties
    material: MaterialModel
    role: MemberRole = MemberRole.WALL
    member: int = 0

    @property
    def rigid(self) -> bool:
        return self.role == MemberRole.RIGID


class PlanarFrame(BaseModel):
    """
    Node/beam-element graph in the bench plane.

    Node coordinates are (y, z): y transverse (grip normal), z along the
    assembly direction. The first ``joint_count`` nodes are member end points.
    """
    model_config = ConfigDict(frozen=True)

    nodes: List[Tuple[float, float]]
    elements: List[FrameElement]
    supports: List[int]
    tip_node: int
    joint_count: int = 0
    mount_angle: float = 0.0
    label: str = ""

    @model_validator(mode="after")
    def _check_graph(self) -> "PlanarFrame":
        n_nodes = len(self.nodes)
        if not self.supports:
            raise ValueError("frame needs at least one support node")
        for idx in list(self.supports) + [self.tip_node]:
            if not 0 <= idx < n_nodes:
                raise ValueError(f"node index {idx} out of range")
        adjacency: Dict[int, List[int]] = {i: [] for i in range(n_nodes)}
        for k, element in enumerate(self.elements):
            i, j = element.node_i, element.node_j
            if not (0 <= i < n_nodes and 0 <= j < n_nodes) or i == j:
                raise ValueError(f"element {k} references invalid nodes ({i}, {j})")
            (yi, zi), (yj, zj) = self.nodes[i], self.nodes[j]
            if math.hypot(yj - yi, zj - zi) <= 0.0:
                raise ValueError(f"element {k} has zero length")
            adjacency[i].append(j)
            adjacency[j].append(i)

        seen = set(self.supports)
        stack = list(self.supports)
        while stack:
            node = stack.pop()
            for neighbour in adjacency[node]:
                if neighbour not in seen:
                    seen.add(neighbour)
                    stack.append(neighbour)
        if self.tip_node not in seen:
            raise ValueError("tip node is not connected to the supports")
        return self

    @property
    def node_count(self) -> int:
        return len(self.nodes)

    @property
    def dof_count(self) -> int:
        return 3 * len(self.nodes)


# ============ Solver models ============

class LoadCase(BaseModel):
    """
    Prescribed motions and applied loads, all in the frame's (y, z) axes.

    ``prescribed_displacements`` maps node -> (dy, dz); ``None`` leaves that
    component free. ``directional_displacements`` maps node -> (ny, nz, value)
    and prescribes only the component along the unit vector (ny, nz).
    """

    prescribed_displacements: Dict[int, Tuple[Optional[float], Optional[float]]] = Field(
        default_factory=dict
    )
    directional_displacements: Dict[int, Tuple[float, float, float]] = Field(default_factory=dict)
    prescribed_rotations: Dict[int, float] = Field(default_factory=dict)
    applied_forces: Dict[int, Tuple[float, float]] = Field(default_factory=dict)
    steps: int = Field(1, ge=1)

    @field_validator("directional_displacements")
    @classmethod
    def _unit_directions(cls, value):
        normalised = {}
        for node, (ny, nz, magnitude) in value.items():
            norm = math.hypot(ny, nz)
            if norm <= 0.0:
                raise ValueError(f"direction for node {node} has zero length")
            normalised[node] = (ny / norm, nz / norm, magnitude)
        return normalised

    def scaled(self, factor: float) -> "LoadCase":
        return LoadCase(
            prescribed_displacements={
                node: tuple(None if c is None else c * factor for c in comps)
                for node, comps in self.prescribed_displacements.items()
            },
            directional_displacements={
                node: (ny, nz, value * factor)
                for node, (ny, nz, value) in self.directional_displacements.items()
            },
            prescribed_rotations={n: r * factor for n, r in self.prescribed_rotations.items()},
            applied_forces={n: (fy * factor, fz * factor) for n, (fy, fz) in self.applied_forces.items()},
            steps=self.steps,
        )


class StepRecord(BaseModel):
    step: int
    load_factor: float
    tip_displacement: Tuple[float, float]
    tip_reaction: Tuple[float, float]
    max_abs_stress: float
    min_tangent_eigenvalue: Optional[float] = None
    iterations: int = 0
    residual: float = 0.0


class SolveResult(BaseModel):
    status: SolveStatus
    linear: bool = True
    displacements: List[Tuple[float, float]]
    rotations: List[float]
    reactions: Dict[int, Tuple[float, float]]
    tip_displacement: Tuple[float, float]
    tip_reaction: Tuple[float, float]
    max_abs_stress: float
    min_tangent_eigenvalue: Optional[float] = None
    yield_strength: Optional[float] = None
    residual: float = 0.0
    load_factor: float = 1.0
    threshold_load_factor: Optional[float] = None
    history: List[StepRecord] = Field(default_factory=list)
    diagnostics: str = ""

    @model_validator(mode="after")
    def _check_status(self) -> "SolveResult":
        if self.status == SolveStatus.YIELDED and self.yield_strength is not None:
            if self.max_abs_stress < self.yield_strength:
                raise ValueError("yielded result below yield strength")
        if self.status == SolveStatus.BUCKLED:
            if self.min_tangent_eigenvalue is None or self.min_tangent_eigenvalue > 0:
                raise ValueError("buckled result needs a non-positive tangent eigenvalue")
        return self


class SolverSettings(BaseModel):
    """Numerical settings shared by stiffness identification, sweeps and the frame builder."""

    tolerance: float = Field(1e-8, gt=0)
    max_iterations: int = Field(50, ge=1)
    stiffness_steps: int = Field(4, ge=1)
    strength_steps: int = Field(20, ge=1)
    elems_per_member: int = Field(2, ge=1)
    min_element_length: float = Field(0.2, gt=0)
    amplitudes_y: List[float] = Field(default_factory=lambda: [0.2, 0.4, 0.6, 0.8, 1.0])
    amplitudes_z: List[float] = Field(default_factory=lambda: [0.02, 0.04, 0.06, 0.08, 0.1])
    nonlinear_stiffness: bool = False
    max_sweep_deflection: float = Field(30.0, gt=0)
    sweep_extensions: int = Field(2, ge=0)
    dense_eigen_limit: int = Field(2000, ge=1)

    @field_validator("amplitudes_y", "amplitudes_z")
    @classmethod
    def _positive_amplitudes(cls, value: List[float]) -> List[float]:
        if len(value) < 5:
            raise ValueError("at least 5 amplitudes per axis are required")
        if any(a <= 0 for a in value):
            raise ValueError("amplitudes must be positive")
        return sorted(value)


# ============ Characterization models ============

class StiffnessMatrix(BaseModel):
    """Fingertip translational stiffness; kxx lumped, K2 = [[kyy, kzy], [kzy, kzz]]."""
    model_config = ConfigDict(frozen=True)

    kxx: float = Field(gt=0)
    kyy: float = Field(gt=0)
    kzz: float = Field(gt=0)
    kzy: float = 0.0
    frame: str = "tip_yz"

    @model_validator(mode="after")
    def _check_definite(self) -> "StiffnessMatrix":
        if self.kyy * self.kzz - self.kzy ** 2 <= 0.0:
            raise ValueError("K2 = [[kyy, kzy], [kzy, kzz]] must be positive definite")
        return self

    @property
    def ratio(self) -> float:
        return self.kzz / self.kyy


class PrincipalAxes(BaseModel):
    angle_deg: float
    soft_stiffness: float
    stiff_stiffness: float


class ViscoelasticFit(BaseModel):
    k: float = Field(gt=0)
    b: float = Field(ge=0)
    residual_rms: float = Field(ge=0)


class StrengthReport(BaseModel):
    max_force: float = Field(gt=0)
    max_deflection: float = Field(gt=0)
    failure_mode: FailureMode
    direction: Tuple[float, float] = (1.0, 0.0)


class StiffnessExtrapolation(BaseModel):
    value: float
    slope: float
    intercept: float


class CalibrationAnchor(BaseModel):
    """Reference design cell and its measured transverse stiffness."""

    infill_direction: float = Field(0.0, ge=0, le=40)
    infill_density: float = Field(0.1, gt=0, le=1)
    fingertip: Optional[Fingertip] = None
    mount_angle: Optional[float] = None
    measured_kyy: float


# ============ Insertion models ============

FIT_CLEARANCE = {
    ConnectorFit.RUNNING: 0.2,
    ConnectorFit.TRANSITION: 0.05,
    ConnectorFit.PRESS: 0.0,
}


class ConnectorTraits(BaseModel):
    fit: ConnectorFit = ConnectorFit.RUNNING
    exposed_after_insert: float = Field(5.0, ge=0)
    gland: Gland = Gland.STRAIGHT
    pin_height: float = -1.0
    locking: Locking = Locking.NONE


class PlugGeometry(BaseModel):
    width: float = Field(10.0, gt=0)
    height: float = Field(12.0, gt=0)


class SocketGeometry(BaseModel):
    depth: float = Field(5.0, gt=0)
    housing_margin: float = Field(6.0, gt=0)


class StrategyParams(BaseModel):
    """Open-loop three-phase search trajectory."""

    approach_height: float = Field(2.0, gt=0)
    preload_depth: float = Field(0.003, ge=0)
    search_start: float = 5.5
    search_end: float = 0.0
    overtravel: float = Field(0.2, ge=0)
    increment: float = Field(0.1, gt=0)
    speed: float = Field(250.0, ge=0)
    stall_steps: int = Field(20, ge=1)
    force_limit: float = Field(60.0, gt=0)
    seat_tolerance: float = Field(0.05, ge=0)

    @model_validator(mode="after")
    def _check_finite(self) -> "StrategyParams":
        for name in ("search_start", "search_end"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        return self


class InsertionScenario(BaseModel):
    plug: PlugGeometry = Field(default_factory=PlugGeometry)
    socket: SocketGeometry = Field(default_factory=SocketGeometry)
    clearance: Optional[float] = Field(None, ge=0)
    friction_mu: float = Field(0.3, ge=0)
    grip_friction_mu: float = Field(0.8, ge=0)
    grip_compliance: StiffnessMatrix
    viscoelastic: Optional[ViscoelasticFit] = None
    misalignment: Tuple[float, float] = (0.0, 0.0)
    tilt: float = Field(10.0, ge=0, lt=45)
    connector_traits: ConnectorTraits = Field(default_factory=ConnectorTraits)
    finger_count: int = Field(2, ge=1)
    free_rotation_limit: float = Field(10.0, ge=0)
    rotation_stiffness: float = Field(50.0, gt=0)
    contact_stiffness: float = Field(1e3, gt=0)

    @model_validator(mode="after")
    def _fill_clearance(self) -> "InsertionScenario":
        if self.clearance is None:
            object.__setattr__(self, "clearance", FIT_CLEARANCE[self.connector_traits.fit])
        if self.connector_traits.exposed_after_insert > self.plug.height - self.socket.depth:
            raise ValueError("plug is too short for the required exposed length after insertion")
        return self

    @property
    def opening_width(self) -> float:
        return self.plug.width + self.clearance

    def offset(self, axis: "Axis") -> float:
        return self.misalignment[0] if axis == Axis.X else self.misalignment[1]

    def with_offset(self, axis: "Axis", value: float) -> "InsertionScenario":
        dx, dy = self.misalignment
        misalignment = (value, dy) if axis == Axis.X else (dx, value)
        return self.model_copy(update={"misalignment": misalignment})


class ContactForce(BaseModel):
    point: Tuple[float, float]
    normal: Tuple[float, float]
    normal_force: float = Field(ge=0)
    tangential_force: float
    friction_mu: float = Field(ge=0)

    @property
    def magnitude(self) -> float:
        return math.hypot(self.normal_force, self.tangential_force)


class TraceSample(BaseModel):
    step: int
    phase: SearchPhase
    command: Tuple[float, float, float]
    pose: Tuple[float, float, float]
    force: Tuple[float, float, float]
    grip_force: Tuple[float, float, float]
    contacts: List[ContactForce] = Field(default_factory=list)
    residual: float = 0.0

    @property
    def max_contact_force(self) -> float:
        return max((c.magnitude for c in self.contacts), default=0.0)


class SearchTrace(BaseModel):
    axis: Axis
    offset: float
    phases: List[SearchPhase]
    samples: List[TraceSample]
    outcome: Outcome
    insert_depth: float = Field(ge=0)
    required_depth: float
    entered_opening: bool = False
    reason: str = ""
    viscous_force: float = 0.0
    viscous_overforce: bool = False

    @model_validator(mode="after")
    def _check_order(self) -> "SearchTrace":
        ranks = [PHASE_ORDER.index(p) for p in self.phases]
        if ranks != sorted(ranks):
            raise ValueError("phases out of order")
        if self.outcome == Outcome.SUCCESS and self.insert_depth < self.required_depth:
            raise ValueError("success requires the plug to reach the required depth")
        return self

    @property
    def tip_path(self) -> List[Tuple[float, float, float]]:
        return [s.pose for s in self.samples]

    @property
    def contact_forces(self) -> List[Tuple[float, float, float]]:
        return [s.force for s in self.samples]

    @property
    def max_contact_force(self) -> float:
        return max((s.max_contact_force for s in self.samples), default=0.0)


class ToleranceWindow(BaseModel):
    axis: Axis
    min_offset: float
    max_offset: float
    window: float = Field(ge=0)
    step: float = Field(gt=0)
    limiting_low: str = ""
    limiting_high: str = ""

    @model_validator(mode="after")
    def _check_window(self) -> "ToleranceWindow":
        if abs(self.window - (self.max_offset - self.min_offset)) > 1e-9:
            raise ValueError("window must equal max_offset - min_offset")
        return self

    @property
    def limiting_outcome(self) -> str:
        return f"{self.limiting_low}/{self.limiting_high}"


# ============ Report records ============

class DesignRow(BaseModel):
    """Design parameters repeated at the head of every report row."""

    design_id: str
    material: str
    infill_direction: float
    infill_density: float
    fingertip: str
    mount_angle: float

    @classmethod
    def columns_of(cls, design_id: str, design: FingerDesign) -> dict:
        return {
            "design_id": design_id,
            "material": design.material.name,
            "infill_direction": design.infill_direction,
            "infill_density": design.infill_density,
            "fingertip": design.fingertip.value,
            "mount_angle": design.mount_angle,
        }

    @property
    def sort_key(self) -> tuple:
        return (
            self.material,
            self.infill_direction,
            self.infill_density,
            self.fingertip,
            self.mount_angle,
            self.design_id,
        )


class StiffnessRecord(DesignRow):
    """One row of the stiffness report."""

    kyy: Optional[float] = None
    kzz: Optional[float] = None
    kzy: Optional[float] = None
    kxx: Optional[float] = None
    ratio: Optional[float] = None
    rcc_angle_deg: Optional[float] = None
    max_force: Optional[float] = None
    max_deflection: Optional[float] = None
    failure_mode: Optional[str] = None
    kyy_measured: Optional[float] = None
    kyy_deviation: Optional[float] = None
    status: str = "ok"
    error_code: Optional[str] = None


class WindowRecord(DesignRow):
    """One row of the window report."""

    kyy: Optional[float] = None
    axis: str = Axis.Y.value
    step: float = 0.5
    min_offset: Optional[float] = None
    max_offset: Optional[float] = None
    window_mm: Optional[float] = None
    window_measured: Optional[float] = None
    limiting_outcome: str = ""
    status: str = "ok"
    error_code: Optional[str] = None
