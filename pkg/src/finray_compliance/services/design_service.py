"""
Design Service - Frame generation and printable exports for one design.
"""

from pathlib import Path
from typing import Dict, Optional

from ..data.models import FingerDesign, PlanarFrame, SolverSettings
from ..geometry.export import export_stl, export_svg
from ..geometry.frame import build_frame
from .base import BaseService, ServiceResult


class DesignService(BaseService):
    """
    Design Service

    Turns a design point into its beam frame and writes the frame SVG and
    the printable STL.
    """

    def __init__(self):
        super().__init__(name="DesignService")

    def build(
        self, design: FingerDesign, settings: Optional[SolverSettings] = None
    ) -> ServiceResult[PlanarFrame]:
        """
        Build the beam frame of a design.

        Args:
            design: Finger design
            settings: Discretization settings

        Returns:
            ServiceResult containing the PlanarFrame
        """
        settings = settings or SolverSettings()
        return self._execute(
            operation=f"build({design.label})",
            handler=lambda: build_frame(
                design, settings.elems_per_member, settings.min_element_length
            ),
        )

    def export(
        self,
        design_id: str,
        design: FingerDesign,
        out_dir: Path,
        settings: Optional[SolverSettings] = None,
    ) -> ServiceResult[Dict[str, str]]:
        """
        Write ``<id>_frame.svg`` and ``<id>.stl``.

        Returns:
            ServiceResult containing the written paths keyed by format
        """
        settings = settings or SolverSettings()

        def write() -> Dict[str, str]:
            frame = build_frame(design, settings.elems_per_member, settings.min_element_length)
            out_dir.mkdir(parents=True, exist_ok=True)
            svg_path = out_dir / f"{design_id}_frame.svg"
            stl_path = out_dir / f"{design_id}.stl"
            svg_path.write_text(export_svg(frame), encoding="utf-8")
            stl_path.write_bytes(export_stl(design))
            return {"svg": str(svg_path), "stl": str(stl_path)}

        return self._execute(operation=f"export({design_id})", handler=write)
