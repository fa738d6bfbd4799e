"""
Study Gateway - Unified interface to the finray services.

This serves as the single entry point for the CLI: it calibrates materials,
fans grid points out over a worker pool and hands back results in input
order so reports are assembled deterministically.
"""

import asyncio
import logging
from concurrent.futures import ProcessPoolExecutor
from typing import Any, Callable, Dict, List, Optional, Sequence

from ..data.models import CalibrationAnchor, FingerDesign, SolverSettings
from .base import ServiceResult
from .characterization_service import CharacterizationJob, CharacterizationService, run_characterization
from .design_service import DesignService
from .insertion_service import InsertionService, WindowJob, run_window

logger = logging.getLogger(__name__)


class StudyGateway:
    """
    Unified gateway for all finray services.

    Args:
        jobs: Worker processes for grid fan-out; 1 runs every point inline
    """

    def __init__(self, jobs: int = 1):
        """Initialize all services."""
        self.jobs = max(1, int(jobs))
        self.design = DesignService()
        self.characterization = CharacterizationService()
        self.insertion = InsertionService()

        logger.info(f"Study gateway initialized with {self.jobs} worker(s)")

    async def _fan_out(
        self, worker: Callable[[Any], ServiceResult], items: Sequence[Any]
    ) -> List[ServiceResult]:
        if not items:
            return []
        if self.jobs == 1 or len(items) == 1:
            return [worker(item) for item in items]
        loop = asyncio.get_running_loop()
        with ProcessPoolExecutor(max_workers=min(self.jobs, len(items))) as pool:
            futures = [loop.run_in_executor(pool, worker, item) for item in items]
            return list(await asyncio.gather(*futures))

    # ============ Calibration ============

    async def calibrate_materials(
        self,
        anchors: Dict[str, CalibrationAnchor],
        designs: Sequence[FingerDesign],
        settings: Optional[SolverSettings] = None,
    ) -> Dict[str, ServiceResult]:
        """
        Modulus scale per calibrated material.

        Args:
            anchors: Material name to anchor cell
            designs: Designs of the study; the first design of each anchored
                material supplies print parameters and envelope

        Returns:
            Material name to ServiceResult containing the scale
        """
        results = {}
        for name in sorted(anchors):
            template = next((d for d in designs if d.material.name == name), None)
            if template is None:
                logger.info(f"Calibration anchor for {name} unused by the study")
                continue
            results[name] = self.characterization.calibration_scale(
                template, anchors[name], settings
            )
        return results

    # ============ Characterization ============

    async def characterize_grid(self, jobs: Sequence[CharacterizationJob]) -> List[ServiceResult]:
        """Characterize every grid point; results follow the job order."""
        logger.info(f"Characterizing {len(jobs)} grid point(s) on {self.jobs} worker(s)")
        return await self._fan_out(run_characterization, list(jobs))

    # ============ Insertion ============

    async def sweep_windows(self, jobs: Sequence[WindowJob]) -> List[ServiceResult]:
        """Tolerance window per design; results follow the job order."""
        logger.info(f"Sweeping {len(jobs)} design(s) on {self.jobs} worker(s)")
        return await self._fan_out(run_window, list(jobs))
