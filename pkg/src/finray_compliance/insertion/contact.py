"""
Penalty contact with Coulomb friction between a rigid plug and a socket.

Both bodies are unions of axis-aligned boxes in their own frames. A
contact is a corner of one body inside a box of the other; it pushes out
through the face it entered by, which is remembered until the corner
leaves the box. Friction is an elastic stick spring per contact whose
anchor is moved by a return mapping once a step has converged.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..data.models import ContactForce

logger = logging.getLogger(__name__)

Vec = Tuple[float, float]

# Corners this close under a face plane glide along it rather than enter sideways.
ENTRY_TOLERANCE = 0.002

FACE_NORMALS: Dict[str, Vec] = {
    "left": (-1.0, 0.0),
    "right": (1.0, 0.0),
    "bottom": (0.0, -1.0),
    "top": (0.0, 1.0),
}


def _tangent(normal: Vec) -> Vec:
    return (-normal[1], normal[0])


def rotation(psi: float) -> np.ndarray:
    c, s = math.cos(psi), math.sin(psi)
    return np.array([[c, -s], [s, c]])


# ============ Geometry ============

@dataclass(frozen=True)
class Box:
    """Axis-aligned box [lo, hi] in (u, z)."""

    name: str
    lo: Vec
    hi: Vec

    def distances(self, point: Sequence[float]) -> Dict[str, float]:
        """Signed distance of a point to each face plane, positive outside."""
        u, z = point
        return {
            "left": self.lo[0] - u,
            "right": u - self.hi[0],
            "bottom": self.lo[1] - z,
            "top": z - self.hi[1],
        }

    def contains(self, point: Sequence[float]) -> bool:
        return all(d < 0.0 for d in self.distances(point).values())

    def entry_face(
        self, previous: Sequence[float], current: Sequence[float], tolerance: float = 0.0
    ) -> str:
        """
        Face crossed last on the straight path from ``previous`` to ``current``.

        If the path crosses that face within ``tolerance`` under another face
        plane, the point was gliding along the other face and enters by it.
        A point starting inside (or starting on no outer side) falls back to
        the face of least penetration.
        """
        before, after = self.distances(previous), self.distances(current)
        crossings = {
            face: before[face] / (before[face] - after[face])
            for face in FACE_NORMALS
            if before[face] >= 0.0 and after[face] < 0.0
        }
        if not crossings:
            return max(after, key=lambda face: (after[face], face))
        face = max(crossings, key=lambda f: (crossings[f], f))
        t = crossings[face]
        point = [p + t * (c - p) for p, c in zip(previous, current)]
        at_entry = self.distances(point)
        grazed = [f for f in FACE_NORMALS if f != face and -tolerance <= at_entry[f] < 0.0]
        if grazed:
            return max(grazed, key=lambda f: (at_entry[f], f))
        return face

    def face_offset(self, face: str) -> float:
        """Signed plane offset n . x of a face."""
        nu, nz = FACE_NORMALS[face]
        if face == "left":
            return nu * self.lo[0]
        if face == "right":
            return nu * self.hi[0]
        if face == "bottom":
            return nz * self.lo[1]
        return nz * self.hi[1]

    @property
    def corners(self) -> List[Vec]:
        (u0, z0), (u1, z1) = self.lo, self.hi
        return [(u0, z0), (u1, z0), (u1, z1), (u0, z1)]


@dataclass
class ContactMemory:
    face: str
    anchor: float


@dataclass
class ContactLaw:
    normal_stiffness: float = 1e3
    tangential_stiffness: float = 1e3
    friction_mu: float = 0.3

    def friction(self, slip: float, normal_force: float) -> Tuple[float, bool]:
        """Stick-spring force opposing ``slip``, capped by the Coulomb cone."""
        trial = -self.tangential_stiffness * slip
        cap = self.friction_mu * normal_force
        if abs(trial) <= cap:
            return trial, False
        return math.copysign(cap, trial), True

    def slipped_anchor(self, coordinate: float, anchor: float, normal_force: float) -> float:
        """Return mapping: pull the anchor to the edge of the cone after a slip."""
        slip = coordinate - anchor
        reach = self.friction_mu * normal_force / self.tangential_stiffness
        if abs(slip) <= reach:
            return anchor
        return coordinate - math.copysign(reach, slip)


@dataclass
class ActiveContact:
    """One resolved contact; force and point are in world coordinates."""

    key: Tuple[str, ...]
    face: str
    point: np.ndarray
    normal: np.ndarray
    tangent: np.ndarray
    normal_force: float
    tangential_force: float
    coordinate: float
    anchor: float
    slipping: bool = False
    force: np.ndarray = field(default_factory=lambda: np.zeros(2))

    def as_record(self, mu: float) -> ContactForce:
        return ContactForce(
            point=(float(self.point[0]), float(self.point[1])),
            normal=(float(self.normal[0]), float(self.normal[1])),
            normal_force=float(self.normal_force),
            tangential_force=float(self.tangential_force),
            friction_mu=mu,
        )


# ============ Contact resolution ============

class ContactModel:
    """
    Contacts between a plug box (body frame, grip point at its top centre)
    and fixed socket boxes.

    Args:
        plug: Plug outline in the body frame
        plug_corners: Named body-frame plug corners checked against the socket
        socket: Fixed socket boxes
        socket_corners: Named socket corners checked against the plug
        law: Penalty and friction parameters
        entry_tolerance: Grazing depth for choosing the entry face
    """

    def __init__(
        self,
        plug: Box,
        plug_corners: Dict[str, Vec],
        socket: Sequence[Box],
        socket_corners: Dict[str, Vec],
        law: ContactLaw,
        entry_tolerance: float = ENTRY_TOLERANCE,
    ):
        self.plug = plug
        self.plug_corners = {k: np.asarray(v, dtype=float) for k, v in plug_corners.items()}
        self.socket = list(socket)
        self.socket_corners = {k: np.asarray(v, dtype=float) for k, v in socket_corners.items()}
        self.law = law
        self.entry_tolerance = entry_tolerance
        self.memory: Dict[Tuple[str, ...], ContactMemory] = {}

    @staticmethod
    def world_point(pose: Sequence[float], body_point: np.ndarray) -> np.ndarray:
        return np.array([pose[0], pose[1]]) + rotation(pose[2]) @ body_point

    @staticmethod
    def body_point(pose: Sequence[float], world_point: np.ndarray) -> np.ndarray:
        return rotation(pose[2]).T @ (world_point - np.array([pose[0], pose[1]]))

    def resolve(self, pose: Sequence[float], previous: Sequence[float]) -> List[ActiveContact]:
        """
        Contacts at a trial pose.

        Args:
            pose: Trial plug pose (u, z, psi) of the grip point
            previous: Last converged pose, used to find the face a new contact entered by

        Returns:
            Active contacts in a fixed order
        """
        contacts = []
        law = self.law

        for name, corner in self.plug_corners.items():
            point = self.world_point(pose, corner)
            for box in self.socket:
                if not box.contains(point):
                    continue
                key = ("plug", name, box.name)
                memory = self.memory.get(key)
                face = memory.face if memory else box.entry_face(
                    self.world_point(previous, corner), point, self.entry_tolerance
                )
                normal = np.array(FACE_NORMALS[face])
                tangent = np.array(_tangent(FACE_NORMALS[face]))
                depth = box.face_offset(face) - float(normal @ point)
                normal_force = law.normal_stiffness * max(depth, 0.0)
                coordinate = float(tangent @ point)
                anchor = memory.anchor if memory else coordinate
                friction, slipping = law.friction(coordinate - anchor, normal_force)
                contacts.append(ActiveContact(
                    key=key,
                    face=face,
                    point=point,
                    normal=normal,
                    tangent=tangent,
                    normal_force=normal_force,
                    tangential_force=friction,
                    coordinate=coordinate,
                    anchor=anchor,
                    slipping=slipping,
                    force=normal_force * normal + friction * tangent,
                ))

        R = rotation(pose[2])
        for name, corner in self.socket_corners.items():
            local = self.body_point(pose, corner)
            if not self.plug.contains(local):
                continue
            key = ("socket", name)
            memory = self.memory.get(key)
            face = memory.face if memory else self.plug.entry_face(
                self.body_point(previous, corner), local, self.entry_tolerance
            )
            normal_b = np.array(FACE_NORMALS[face])
            tangent_b = np.array(_tangent(FACE_NORMALS[face]))
            depth = self.plug.face_offset(face) - float(normal_b @ local)
            normal_force = law.normal_stiffness * max(depth, 0.0)
            coordinate = float(tangent_b @ local)
            anchor = memory.anchor if memory else coordinate
            # the plug moves opposite to the corner's motion in the body frame
            friction, slipping = law.friction(anchor - coordinate, normal_force)
            normal = -(R @ normal_b)
            tangent = R @ tangent_b
            contacts.append(ActiveContact(
                key=key,
                face=face,
                point=np.asarray(corner, dtype=float),
                normal=normal,
                tangent=tangent,
                normal_force=normal_force,
                tangential_force=friction,
                coordinate=coordinate,
                anchor=anchor,
                slipping=slipping,
                force=normal_force * normal + friction * tangent,
            ))
        return contacts

    def wrench(self, pose: Sequence[float], contacts: Sequence[ActiveContact]) -> np.ndarray:
        """Total contact force and moment about the grip point."""
        total = np.zeros(3)
        for contact in contacts:
            lever = contact.point - np.array([pose[0], pose[1]])
            total[:2] += contact.force
            total[2] += lever[0] * contact.force[1] - lever[1] * contact.force[0]
        return total

    def commit(self, contacts: Sequence[ActiveContact]) -> None:
        """Keep converged contacts and move slipping anchors onto the cone."""
        memory = {}
        for contact in contacts:
            anchor = self.law.slipped_anchor(
                contact.coordinate, contact.anchor, contact.normal_force
            )
            memory[contact.key] = ContactMemory(face=contact.face, anchor=anchor)
        released = set(self.memory) - set(memory)
        if released:
            logger.debug(f"Released contacts {sorted(released)}")
        self.memory = memory


# ============ Wedging ============

def jamming_check(contacts: Sequence[ContactForce], mu: Optional[float] = None) -> bool:
    """
    Two-point wedging test.

    True when some pair of distinct contact points sees the line joining
    them strictly inside both friction cones, so the pair can carry an
    arbitrarily large squeeze without slipping.

    This is the geometric wedging condition only; it takes no applied push
    direction. The simulator supplies the push by requiring a stalled
    insert (no progress over ``stall_steps`` increments) before it calls a
    wedged pair jammed.

    Args:
        contacts: Contact points with the unit normal of the force on the plug
        mu: Friction coefficient; defaults to each contact's own
    """
    for i, first in enumerate(contacts):
        for second in contacts[i + 1:]:
            p1, p2 = np.asarray(first.point), np.asarray(second.point)
            span = p2 - p1
            length = float(np.hypot(*span))
            if length <= 1e-9:
                continue
            mu1 = first.friction_mu if mu is None else mu
            mu2 = second.friction_mu if mu is None else mu
            if _inside_cone(np.asarray(first.normal), span / length, mu1) and _inside_cone(
                np.asarray(second.normal), -span / length, mu2
            ):
                return True
    return False


def _inside_cone(normal: np.ndarray, direction: np.ndarray, mu: float) -> bool:
    if mu <= 0.0:
        return False
    norm = float(np.hypot(*normal))
    if norm <= 0.0:
        return False
    cosine = float(normal @ direction) / norm
    angle = math.acos(min(max(cosine, -1.0), 1.0))
    return angle < math.atan(mu)
