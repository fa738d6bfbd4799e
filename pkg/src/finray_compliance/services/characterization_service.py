"""
Characterization Service - Stiffness, RCC and strength of one grid point.
"""

from typing import Optional, Tuple

from pydantic import BaseModel, Field

from ..characterize.stiffness import calibrate, identify_stiffness, principal_axis
from ..characterize.strength import TRANSVERSE, strength_sweep
from ..characterize.viscoelastic import fit_viscoelastic
from ..data.models import (
    CalibrationAnchor,
    DesignRow,
    FingerDesign,
    SolverSettings,
    StiffnessRecord,
    ViscoelasticFit,
)
from ..data.reference import MEASURED_KXX, calibration_deviation, measured_kyy
from ..geometry.frame import build_frame
from .base import BaseService, ServiceResult


class CharacterizationJob(BaseModel):
    """One grid point to characterize."""

    design_id: str
    design: FingerDesign
    settings: SolverSettings = Field(default_factory=SolverSettings)
    kxx_lumped: float = MEASURED_KXX
    strength_direction: Tuple[float, float] = TRANSVERSE


class CharacterizationService(BaseService):
    """
    Characterization Service

    Runs the virtual bench on a design: stiffness identification, principal axes
    and the strength sweep, compared against the bench reference where one
    exists.
    """

    def __init__(self):
        super().__init__(name="CharacterizationService")

    def calibration_scale(
        self,
        design: FingerDesign,
        anchor: CalibrationAnchor,
        settings: Optional[SolverSettings] = None,
    ) -> ServiceResult[float]:
        """
        Modulus scale of a material from its anchor cell.

        Args:
            design: Any design of the material
            anchor: Anchor cell with the measured transverse stiffness

        Returns:
            ServiceResult containing the scale factor
        """
        return self._execute(
            operation=f"calibrate({design.material.name})",
            handler=lambda: calibrate(design, anchor, settings),
        )

    def characterize(self, job: CharacterizationJob) -> ServiceResult[StiffnessRecord]:
        """
        Characterize one design point.

        Returns:
            ServiceResult containing the report row
        """
        def run() -> StiffnessRecord:
            design, settings = job.design, job.settings
            frame = build_frame(design, settings.elems_per_member, settings.min_element_length)
            stiffness = identify_stiffness(frame, settings, job.kxx_lumped)
            axes = principal_axis(stiffness)
            strength = strength_sweep(frame, job.strength_direction, settings)
            reference = measured_kyy(
                design.material.name, design.infill_direction, design.infill_density
            )
            return StiffnessRecord(
                **DesignRow.columns_of(job.design_id, design),
                kyy=stiffness.kyy,
                kzz=stiffness.kzz,
                kzy=stiffness.kzy,
                kxx=stiffness.kxx,
                ratio=stiffness.ratio,
                rcc_angle_deg=axes.angle_deg,
                max_force=strength.max_force,
                max_deflection=strength.max_deflection,
                failure_mode=strength.failure_mode.value,
                kyy_measured=reference,
                kyy_deviation=calibration_deviation(stiffness.kyy, reference),
            )

        return self._execute(operation=f"characterize({job.design_id})", handler=run)

    def fit_viscoelastic(self, samples) -> ServiceResult[ViscoelasticFit]:
        """Spring-damper fit of (displacement, velocity, force) samples."""
        return self._execute(
            operation=f"fit_viscoelastic({len(samples)} samples)",
            handler=lambda: fit_viscoelastic(samples),
        )


def run_characterization(job: CharacterizationJob) -> ServiceResult:
    """Worker entry point; picklable for process pools."""
    return CharacterizationService().characterize(job)


def failed_record(job: CharacterizationJob, result: ServiceResult) -> StiffnessRecord:
    """Flagged row with blank numerics for a failed grid point."""
    return StiffnessRecord(
        **DesignRow.columns_of(job.design_id, job.design),
        status="failed",
        error_code=result.error_code,
    )
