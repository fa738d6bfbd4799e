"""
Finger frame generation and SVG/STL export.
"""

from .export import export_stl, export_svg, export_trajectory_svg, extrude_polygon, stl_triangle_count
from .frame import build_frame, count_ribs, fingertip_contact, rib_layout

__all__ = [
    "build_frame",
    "count_ribs",
    "fingertip_contact",
    "rib_layout",
    "export_stl",
    "export_svg",
    "export_trajectory_svg",
    "extrude_polygon",
    "stl_triangle_count",
]
