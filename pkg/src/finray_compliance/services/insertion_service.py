"""
Insertion Service - Search simulations and tolerance windows.
"""

from typing import Any, Dict, Optional

from pydantic import BaseModel, Field

from ..characterize.stiffness import identify_stiffness
from ..data.models import (
    Axis,
    DesignRow,
    FingerDesign,
    InsertionScenario,
    SearchTrace,
    SolverSettings,
    StiffnessMatrix,
    StrategyParams,
    WindowRecord,
)
from ..data.reference import MEASURED_KXX, measured_y_window
from ..errors import ContactResolutionError
from ..geometry.frame import build_frame
from ..insertion.simulate import simulate_insert
from ..insertion.window import DEFAULT_STEP, tolerance_window
from .base import BaseService, ServiceResult


class WindowJob(BaseModel):
    """
    One design swept over misalignment.

    ``scenario`` holds every InsertionScenario field except the grip
    compliance, which is identified from the design.
    """

    design_id: str
    design: FingerDesign
    scenario: Dict[str, Any] = Field(default_factory=dict)
    strategy: StrategyParams = Field(default_factory=StrategyParams)
    axis: Axis = Axis.Y
    step: float = Field(DEFAULT_STEP, gt=0)
    settings: SolverSettings = Field(default_factory=SolverSettings)
    kxx_lumped: float = MEASURED_KXX


class DesignWindow(BaseModel):
    """Window row plus the zero-offset trace drawn for the design."""

    record: WindowRecord
    trace: Optional[SearchTrace] = None


class InsertionService(BaseService):
    """
    Insertion Service

    Runs search simulations and window scans with the compliance of a
    finger design.
    """

    def __init__(self):
        super().__init__(name="InsertionService")

    def compliance(
        self, design: FingerDesign, settings: Optional[SolverSettings] = None,
        kxx_lumped: float = MEASURED_KXX,
    ) -> ServiceResult[StiffnessMatrix]:
        """Identified fingertip stiffness of a design, used as grip compliance."""
        settings = settings or SolverSettings()
        return self._execute(
            operation=f"compliance({design.label})",
            handler=lambda: identify_stiffness(
                build_frame(design, settings.elems_per_member, settings.min_element_length),
                settings,
                kxx_lumped,
            ),
        )

    def simulate(
        self,
        scenario: InsertionScenario,
        strategy: Optional[StrategyParams] = None,
        axis: Axis = Axis.Y,
    ) -> ServiceResult[SearchTrace]:
        """
        Simulate one insertion.

        Returns:
            ServiceResult containing the SearchTrace
        """
        return self._execute(
            operation=f"simulate({axis.value}={scenario.offset(axis):+g})",
            handler=lambda: simulate_insert(scenario, strategy, axis),
        )

    def design_window(self, job: WindowJob) -> ServiceResult[DesignWindow]:
        """
        Identify a design's compliance, scan its window and trace offset 0.

        Returns:
            ServiceResult containing the report row and the trace
        """
        def run() -> DesignWindow:
            settings = job.settings
            frame = build_frame(job.design, settings.elems_per_member, settings.min_element_length)
            stiffness = identify_stiffness(frame, settings, job.kxx_lumped)
            scenario = InsertionScenario(**job.scenario, grip_compliance=stiffness)
            window = tolerance_window(scenario, job.axis, job.step, job.strategy)
            try:
                trace = simulate_insert(
                    scenario.with_offset(job.axis, 0.0), job.strategy, job.axis
                )
            except ContactResolutionError as e:
                self.logger.warning(f"No zero-offset trace for {job.design_id}: {e}")
                trace = None
            measured = None
            if job.axis == Axis.Y:
                measured = measured_y_window(
                    job.design.material.name, job.design.infill_direction, job.design.infill_density
                )
            record = WindowRecord(
                **DesignRow.columns_of(job.design_id, job.design),
                kyy=stiffness.kyy,
                axis=job.axis.value,
                step=job.step,
                min_offset=window.min_offset,
                max_offset=window.max_offset,
                window_mm=window.window,
                window_measured=measured,
                limiting_outcome=window.limiting_outcome,
            )
            return DesignWindow(record=record, trace=trace)

        return self._execute(operation=f"design_window({job.design_id})", handler=run)


def run_window(job: WindowJob) -> ServiceResult:
    """Worker entry point; picklable for process pools."""
    return InsertionService().design_window(job)


def failed_window(job: WindowJob, result: ServiceResult) -> WindowRecord:
    """Flagged row with blank numerics for a failed design."""
    return WindowRecord(
        **DesignRow.columns_of(job.design_id, job.design),
        axis=job.axis.value,
        step=job.step,
        status="failed",
        error_code=result.error_code,
    )
