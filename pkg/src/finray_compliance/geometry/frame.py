"""
Planar beam-frame generation for finray fingers.

The finger is laid out in its own frame (t, a): t transverse, positive toward
the gripping side, a along the finger from the base (a = 0) to the tip
(a = height). Walls run from (-Wb/2, 0) to (-Wt/2, H) and mirrored; only the
part above ``base_height`` is flexible, the solid base below it becomes fixed
supports. Ribs are parallel lines of perpendicular pitch
``rib_spacing(density)`` inclined at ``infill_direction``. The finished frame
is rotated counter-clockwise by ``mount_angle`` into the bench axes (y, z).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

import numpy as np

from ..data.materials import beam_section, rib_spacing
from ..data.models import (
    FingerDesign,
    FingertipContact,
    Fingertip,
    FrameElement,
    MemberRole,
    PlanarFrame,
)
from ..errors import DegenerateRibLayoutError, GeometryError

logger = logging.getLogger(__name__)

Point = Tuple[float, float]

RIGID_LINK_THICKNESS = 10.0
GRIP_PAD_FRICTION = 0.8


# ============ Rib layout ============

@dataclass
class RibSegment:
    """A clipped rib line; ``start``/``end`` carry where each end lands."""
    start: Point
    end: Point
    start_on: str
    end_on: str


def _half_width(design: FingerDesign, a: float) -> float:
    env = design.envelope
    return env.base_width / 2.0 + (env.tip_width - env.base_width) / 2.0 * a / env.height


def _clip_rib(design: FingerDesign, a_center: float, alpha: float) -> Optional[RibSegment]:
    env = design.envelope
    ca, sa = math.cos(alpha), math.sin(alpha)
    g = (env.tip_width - env.base_width) / (2.0 * env.height)
    h0 = env.base_width / 2.0 + g * a_center

    # parameter s along (cos a, -sin a) through (0, a_center)
    s_right = h0 / (ca + g * sa)
    s_left = -h0 / (ca - g * sa)
    lo, hi = s_left, s_right
    lo_on, hi_on = "left", "right"
    if sa > 1e-12:
        s_tip = (a_center - env.height) / sa
        s_base = (a_center - env.base_height) / sa
        if s_tip > lo:
            lo, lo_on = s_tip, "tip"
        if s_base < hi:
            hi, hi_on = s_base, "base"
    elif not env.base_height < a_center < env.height:
        return None
    if hi - lo <= 0.0:
        return None

    def at(s: float) -> Point:
        return (s * ca, a_center - s * sa)

    return RibSegment(start=at(lo), end=at(hi), start_on=lo_on, end_on=hi_on)


def rib_layout(design: FingerDesign, min_length: float = 0.2) -> List[RibSegment]:
    """
    Rib segments of a design, ordered from the base upward.

    Lines are centred in the usable height: line k crosses the finger axis at
    ``base_height + offset + (k - 1/2) * pitch`` with axial pitch p / cos(alpha).
    For inclined ribs, lines whose axis crossing falls outside the usable
    height are kept when they still cut a piece of the interior.

    Raises:
        DegenerateRibLayoutError: if not a single full rib pitch fits
    """
    env = design.envelope
    alpha = math.radians(design.infill_direction)
    pitch = rib_spacing(design.infill_density, design.print_params) / math.cos(alpha)
    usable = env.usable_height
    count = int(math.floor(usable / pitch + 1e-9))
    if count < 1:
        raise DegenerateRibLayoutError(
            f"rib pitch {pitch:.3f} mm exceeds usable finger height {usable:.3f} mm"
        )
    offset = (usable - count * pitch) / 2.0

    extra = 0
    if alpha > 0.0:
        reach = env.base_width / 2.0 * math.tan(alpha)
        extra = int(math.ceil(reach / pitch)) + 1

    segments = []
    for k in range(1 - extra, count + 1 + extra):
        a_center = env.base_height + offset + (k - 0.5) * pitch
        segment = _clip_rib(design, a_center, alpha)
        if segment is None:
            continue
        if math.dist(segment.start, segment.end) <= min_length:
            continue
        segments.append(segment)
    return segments


# ============ Frame assembly ============

@dataclass
class _Member:
    i: int
    j: int
    role: MemberRole


@dataclass
class _FrameBuilder:
    min_length: float
    joints: List[Point] = field(default_factory=list)
    members: List[_Member] = field(default_factory=list)
    supports: List[int] = field(default_factory=list)

    def joint(self, point: Point, support: bool = False) -> int:
        for idx, existing in enumerate(self.joints):
            if math.dist(existing, point) < self.min_length:
                if support and idx not in self.supports:
                    self.supports.append(idx)
                return idx
        self.joints.append((float(point[0]), float(point[1])))
        idx = len(self.joints) - 1
        if support:
            self.supports.append(idx)
        return idx

    def member(self, i: int, j: int, role: MemberRole) -> None:
        if i == j:
            return
        if any({m.i, m.j} == {i, j} for m in self.members):
            return
        self.members.append(_Member(i, j, role))

    def chain(self, ids: List[int], role: MemberRole) -> None:
        ordered = []
        for idx in ids:
            if not ordered or ordered[-1] != idx:
                ordered.append(idx)
        for i, j in zip(ordered[:-1], ordered[1:]):
            self.member(i, j, role)


def contact_point(design: FingerDesign) -> Point:
    """Fingertip contact point in the finger frame."""
    env = design.envelope
    t = env.tip_width / 2.0
    if design.fingertip.is_notched:
        t -= env.notch_depth
    return (t, env.height + env.tip_height / 2.0)


def _rotate(points: np.ndarray, angle_deg: float) -> np.ndarray:
    c, s = math.cos(math.radians(angle_deg)), math.sin(math.radians(angle_deg))
    rotation = np.array([[c, -s], [s, c]])
    return points @ rotation.T


def build_frame(
    design: FingerDesign,
    elems_per_member: int = 2,
    min_element_length: float = 0.2,
) -> PlanarFrame:
    """
    Discretize a finger design into a planar beam frame.

    Args:
        design: Finger design point
        elems_per_member: Beam elements per member between joints
        min_element_length: Joints closer than this merge; no element is shorter

    Returns:
        PlanarFrame in bench axes (y, z) with the fingertip contact node as tip

    Raises:
        GeometryError: if the notch is at least as wide as the fingertip
        DegenerateRibLayoutError: if the rib pitch exceeds the usable height
    """
    if elems_per_member < 1:
        raise GeometryError(f"elems_per_member must be >= 1, got {elems_per_member}")
    env = design.envelope
    if design.fingertip.is_notched and design.notch_width >= env.tip_width:
        raise GeometryError(
            f"notch width {design.notch_width} mm is not narrower than the tip ({env.tip_width} mm)"
        )

    ribs = rib_layout(design, min_element_length)
    builder = _FrameBuilder(min_length=min_element_length)

    hb, height = env.base_height, env.height
    corners = {
        "left_base": (-_half_width(design, hb), hb),
        "right_base": (_half_width(design, hb), hb),
        "left_tip": (-_half_width(design, height), height),
        "right_tip": (_half_width(design, height), height),
    }
    left_base = builder.joint(corners["left_base"], support=True)
    right_base = builder.joint(corners["right_base"], support=True)
    left_tip = builder.joint(corners["left_tip"])
    right_tip = builder.joint(corners["right_tip"])

    on_wall: Dict[str, List[Tuple[float, int]]] = {
        "left": [(hb, left_base), (height, left_tip)],
        "right": [(hb, right_base), (height, right_tip)],
        "tip": [(corners["left_tip"][0], left_tip), (corners["right_tip"][0], right_tip)],
    }
    rib_ends = []
    for rib in ribs:
        ends = []
        for point, where in ((rib.start, rib.start_on), (rib.end, rib.end_on)):
            idx = builder.joint(point, support=(where == "base"))
            if where in ("left", "right"):
                on_wall[where].append((point[1], idx))
            elif where == "tip":
                on_wall["tip"].append((point[0], idx))
            ends.append(idx)
        rib_ends.append(ends)

    for side in ("left", "right"):
        builder.chain([idx for _, idx in sorted(on_wall[side])], MemberRole.WALL)
    builder.chain([idx for _, idx in sorted(on_wall["tip"])], MemberRole.TIP)
    for i, j in rib_ends:
        builder.member(i, j, MemberRole.RIB)

    tip = builder.joint(contact_point(design))
    builder.member(tip, left_tip, MemberRole.RIGID)
    builder.member(tip, right_tip, MemberRole.RIGID)

    params = design.print_params
    sections = {
        MemberRole.WALL: beam_section(params, params.wall_thickness),
        MemberRole.RIB: beam_section(params),
        MemberRole.TIP: beam_section(params, env.tip_height),
        MemberRole.RIGID: beam_section(params, RIGID_LINK_THICKNESS),
    }

    joint_count = len(builder.joints)
    local = [np.array(p) for p in builder.joints]
    elements: List[FrameElement] = []
    for member_id, member in enumerate(builder.members):
        p_i, p_j = local[member.i], local[member.j]
        length = float(np.linalg.norm(p_j - p_i))
        n_el = 1
        if member.role != MemberRole.RIGID:
            n_el = max(1, min(elems_per_member, int(math.floor(length / min_element_length))))
        chain = [member.i]
        for k in range(1, n_el):
            local.append(p_i + (p_j - p_i) * k / n_el)
            chain.append(len(local) - 1)
        chain.append(member.j)
        for a, b in zip(chain[:-1], chain[1:]):
            elements.append(FrameElement(
                node_i=a,
                node_j=b,
                section=sections[member.role],
                material=design.material,
                role=member.role,
                member=member_id,
            ))

    rotated = _rotate(np.vstack(local), design.mount_angle)
    frame = PlanarFrame(
        nodes=[(float(y), float(z)) for y, z in rotated],
        elements=elements,
        supports=sorted(builder.supports),
        tip_node=tip,
        joint_count=joint_count,
        mount_angle=design.mount_angle,
        label=design.label,
    )
    logger.info(
        f"Built frame {frame.label}: {len(ribs)} ribs, {frame.node_count} nodes, "
        f"{len(elements)} elements"
    )
    return frame


def count_ribs(frame: PlanarFrame) -> int:
    """Number of rib members in a frame."""
    return len({e.member for e in frame.elements if e.role == MemberRole.RIB})


def fingertip_contact(design: FingerDesign) -> FingertipContact:
    """Contact surface abstraction of the design's fingertip option."""
    env = design.envelope
    if design.fingertip == Fingertip.ROUNDED:
        angle, half_width = 0.0, env.tip_height / 4.0
    elif design.fingertip == Fingertip.FLAT:
        angle, half_width = 0.0, env.tip_height / 2.0
    elif design.fingertip == Fingertip.FLAT_ANGLED:
        # face cut so that it stands parallel to the assembly axis once mounted
        angle, half_width = -design.mount_angle, env.tip_height / 2.0
    else:
        angle, half_width = 0.0, design.notch_width / 2.0
    return FingertipContact(
        contact_plane_angle=angle,
        contact_half_width=half_width,
        friction_mu=GRIP_PAD_FRICTION,
    )
