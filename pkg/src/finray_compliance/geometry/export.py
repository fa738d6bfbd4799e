"""
SVG and binary STL export of finger frames, printable finger bodies and
insertion trajectories.
"""

import logging
import math
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..data.models import FingerDesign, MemberRole, PlanarFrame, SearchTrace
from ..errors import GeometryError
from .frame import build_frame

logger = logging.getLogger(__name__)

STL_HEADER = b"finray_compliance binary STL"
STL_RECORD = np.dtype([
    ("normal", "<f4", (3,)),
    ("vertices", "<f4", (3, 3)),
    ("attribute", "<u2"),
])

_STYLES = {
    MemberRole.WALL.value: "stroke:#1f4e79;stroke-width:0.4",
    MemberRole.RIB.value: "stroke:#5b9bd5;stroke-width:0.4",
    MemberRole.TIP.value: "stroke:#404040;stroke-width:1.0",
    MemberRole.RIGID.value: "stroke:#a0a0a0;stroke-width:0.3;stroke-dasharray:1,1",
}


def _fmt(value: float) -> str:
    text = f"{value:.4f}"
    return "0.0000" if text == "-0.0000" else text


def _svg_document(width: float, height: float, view_box: Tuple[float, float, float, float],
                  body: List[str]) -> str:
    x0, y0, w, h = view_box
    lines = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        (
            f'<svg xmlns="http://www.w3.org/2000/svg" version="1.1" '
            f'width="{_fmt(width)}mm" height="{_fmt(height)}mm" '
            f'viewBox="{_fmt(x0)} {_fmt(y0)} {_fmt(w)} {_fmt(h)}">'
        ),
    ]
    lines.extend(body)
    lines.append("</svg>")
    return "\n".join(lines) + "\n"


# ============ Frame SVG ============

def export_svg(
    frame: PlanarFrame,
    deflection: Optional[Sequence[Tuple[float, float]]] = None,
    scale: float = 1.0,
    margin: float = 5.0,
) -> str:
    """
    Wireframe SVG of a frame, optionally with a deformed overlay.

    Each element is one polyline carrying its role as class and its member
    index as ``data-member``. SVG y points down, so z is flipped.

    Args:
        frame: Frame to draw
        deflection: Per-node (dy, dz) displacements for the overlay
        scale: Overlay magnification
        margin: Border around the drawing in mm

    Raises:
        GeometryError: if the deflection does not match the node count
    """
    base = np.asarray(frame.nodes, dtype=float)
    deformed = None
    if deflection is not None:
        field = np.asarray(deflection, dtype=float)
        if field.shape != base.shape:
            raise GeometryError(
                f"deflection has {len(field)} entries, frame has {frame.node_count} nodes"
            )
        deformed = base + scale * field

    extent = base if deformed is None else np.vstack([base, deformed])
    y_min, z_min = extent.min(axis=0) - margin
    y_max, z_max = extent.max(axis=0) + margin
    width, height = y_max - y_min, z_max - z_min

    def polylines(points: np.ndarray, extra_class: str = "") -> List[str]:
        out = []
        for element in frame.elements:
            (yi, zi), (yj, zj) = points[element.node_i], points[element.node_j]
            role = element.role.value
            css = f"{extra_class} {role}".strip()
            out.append(
                f'  <polyline class="{css}" data-member="{element.member}" '
                f'style="fill:none;{_STYLES[role]}" '
                f'points="{_fmt(yi)},{_fmt(-zi)} {_fmt(yj)},{_fmt(-zj)}"/>'
            )
        return out

    body = [f'<title>{frame.label or "frame"}</title>', '<g id="undeformed">']
    body.extend(polylines(base))
    body.append("</g>")
    if deformed is not None:
        body.append(f'<g id="deformed" data-scale="{_fmt(scale)}" style="opacity:0.6">')
        body.extend(polylines(deformed, "deformed"))
        body.append("</g>")
    ty, tz = base[frame.tip_node]
    body.append(f'<circle class="tip" cx="{_fmt(ty)}" cy="{_fmt(-tz)}" r="0.8" style="fill:#c00000"/>')
    for idx in frame.supports:
        sy, sz = base[idx]
        body.append(
            f'<rect class="support" x="{_fmt(sy - 0.5)}" y="{_fmt(-sz)}" '
            f'width="1.0000" height="1.0000" style="fill:#404040"/>'
        )
    return _svg_document(width, height, (y_min, -z_max, width, height), body)


# ============ Trajectory SVG ============

_PHASE_COLOURS = {
    "approach": "#7f7f7f",
    "slide_x": "#ed7d31",
    "slide_y": "#ed7d31",
    "insert_z": "#70ad47",
}


def export_trajectory_svg(trace: SearchTrace, margin: float = 3.0) -> str:
    """Plug grip-point path per phase with contact-force markers."""
    if not trace.samples:
        raise GeometryError("trace has no samples")
    path = np.array([(s.pose[0], s.pose[1]) for s in trace.samples], dtype=float)
    commanded = np.array([(s.command[0], s.command[1]) for s in trace.samples], dtype=float)
    extent = np.vstack([path, commanded])
    u_min, z_min = extent.min(axis=0) - margin
    u_max, z_max = extent.max(axis=0) + margin
    width, height = u_max - u_min, z_max - z_min

    body = [
        f'<title>{trace.axis.value} offset {_fmt(trace.offset)} {trace.outcome.value}</title>',
        '<polyline class="command" style="fill:none;stroke:#bfbfbf;stroke-width:0.1" points="'
        + " ".join(f"{_fmt(u)},{_fmt(-z)}" for u, z in commanded) + '"/>',
    ]
    for phase in trace.phases:
        points = [(s.pose[0], s.pose[1]) for s in trace.samples if s.phase == phase]
        if not points:
            continue
        body.append(
            f'<polyline class="{phase.value}" '
            f'style="fill:none;stroke:{_PHASE_COLOURS[phase.value]};stroke-width:0.15" points="'
            + " ".join(f"{_fmt(u)},{_fmt(-z)}" for u, z in points) + '"/>'
        )
    peak = max(trace.max_contact_force, 1e-12)
    for sample in trace.samples:
        force = sample.max_contact_force
        if force <= 0.0:
            continue
        u, z, _ = sample.pose
        body.append(
            f'<circle class="contact" data-step="{sample.step}" data-force="{_fmt(force)}" '
            f'cx="{_fmt(u)}" cy="{_fmt(-z)}" r="{_fmt(0.05 + 0.3 * force / peak)}" '
            f'style="fill:#c00000;opacity:0.4"/>'
        )
    return _svg_document(width, height, (u_min, -z_max, width, height), body)


# ============ STL ============

def extrude_polygon(outline: Sequence[Tuple[float, float]], depth: float) -> np.ndarray:
    """
    Triangulated closed prism of a convex outline extruded along +z.

    Returns:
        Array of shape (n_triangles, 3, 3), counter-clockwise seen from outside

    Raises:
        GeometryError: for fewer than 3 points, zero area or non-positive depth
    """
    pts = np.asarray(outline, dtype=float)
    if pts.ndim != 2 or pts.shape[0] < 3 or pts.shape[1] != 2:
        raise GeometryError("outline needs at least 3 planar points")
    if not depth > 0.0:
        raise GeometryError(f"extrusion depth must be positive, got {depth}")
    x, y = pts[:, 0], pts[:, 1]
    area = 0.5 * float(np.dot(x, np.roll(y, -1)) - np.dot(np.roll(x, -1), y))
    if abs(area) < 1e-12:
        raise GeometryError("outline has zero area")
    if area < 0.0:
        pts = pts[::-1]

    n = len(pts)
    bottom = np.column_stack([pts, np.zeros(n)])
    top = np.column_stack([pts, np.full(n, depth)])
    triangles = []
    for k in range(1, n - 1):
        triangles.append([bottom[0], bottom[k + 1], bottom[k]])
        triangles.append([top[0], top[k], top[k + 1]])
    for k in range(n):
        m = (k + 1) % n
        triangles.append([bottom[k], bottom[m], top[m]])
        triangles.append([bottom[k], top[m], top[k]])
    return np.array(triangles, dtype=float)


def _box(p: np.ndarray, q: np.ndarray, thickness: float) -> List[Tuple[float, float]]:
    d = (q - p) / np.linalg.norm(q - p)
    n = np.array([-d[1], d[0]]) * thickness / 2.0
    return [tuple(p + n), tuple(q + n), tuple(q - n), tuple(p - n)]


def _rect(t0: float, t1: float, a0: float, a1: float) -> Optional[List[Tuple[float, float]]]:
    if t1 - t0 <= 1e-9 or a1 - a0 <= 1e-9:
        return None
    return [(t0, a0), (t1, a0), (t1, a1), (t0, a1)]


def body_outlines(design: FingerDesign) -> List[List[Tuple[float, float]]]:
    """
    Planar outlines of every printed solid, in the unrotated finger frame.

    One box per wall, rib and tip member, the solid base block and the
    fingertip cap (with the notch cut out of the gripping face).
    """
    frame = build_frame(design, elems_per_member=1)
    angle = -math.radians(frame.mount_angle)
    c, s = math.cos(angle), math.sin(angle)
    local = np.asarray(frame.nodes) @ np.array([[c, -s], [s, c]]).T

    outlines = []
    for element in frame.elements:
        if element.rigid:
            continue
        outlines.append(_box(local[element.node_i], local[element.node_j],
                             element.section.thickness))

    env = design.envelope
    outlines.append(_rect(-env.base_width / 2.0, env.base_width / 2.0, 0.0, env.base_height))
    half_tip, h, th = env.tip_width / 2.0, env.height, env.tip_height
    if design.fingertip.is_notched:
        mid = h + th / 2.0
        cap = [
            _rect(-half_tip, half_tip - env.notch_depth, h, h + th),
            _rect(half_tip - env.notch_depth, half_tip, h, mid - design.notch_width / 2.0),
            _rect(half_tip - env.notch_depth, half_tip, mid + design.notch_width / 2.0, h + th),
        ]
    else:
        cap = [_rect(-half_tip, half_tip, h, h + th)]
    outlines.extend(box for box in cap if box is not None)
    return outlines


def stl_bytes(triangles: np.ndarray, header: bytes = STL_HEADER) -> bytes:
    """Binary little-endian STL of an (n, 3, 3) triangle array."""
    tri = np.asarray(triangles, dtype=float)
    if tri.ndim != 3 or tri.shape[1:] != (3, 3) or len(tri) == 0:
        raise GeometryError("no triangles to write")
    normals = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    lengths = np.linalg.norm(normals, axis=1)
    if np.any(lengths <= 0.0):
        raise GeometryError("degenerate triangle in mesh")
    records = np.zeros(len(tri), dtype=STL_RECORD)
    records["normal"] = normals / lengths[:, None]
    records["vertices"] = tri
    head = header[:80].ljust(80, b" ")
    return head + np.uint32(len(tri)).astype("<u4").tobytes() + records.tobytes()


def export_stl(design: FingerDesign, mirror: bool = False) -> bytes:
    """
    Printable finger body as binary STL.

    Every solid is its own closed prism extruded to ``envelope.depth``.
    Members overlap at the joints; the shells are not merged, slicers union
    intersecting shells of one file into a single part.

    Args:
        design: Finger design
        mirror: Mirror across the finger axis (the opposing finger)
    """
    depth = design.envelope.depth
    meshes = []
    for outline in body_outlines(design):
        if mirror:
            outline = [(-t, a) for t, a in outline]
        meshes.append(extrude_polygon(outline, depth))
    triangles = np.concatenate(meshes)
    logger.info(f"STL for {design.label}: {len(triangles)} triangles")
    return stl_bytes(triangles)


def stl_triangle_count(payload: bytes) -> int:
    """Facet count field of a binary STL."""
    if len(payload) < 84:
        raise GeometryError("STL payload shorter than its header")
    return int(np.frombuffer(payload[80:84], dtype="<u4")[0])
