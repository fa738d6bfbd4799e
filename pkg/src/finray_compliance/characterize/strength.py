"""
Ultimate strength and maximum deflection by a displacement-controlled sweep.
"""

import logging
import math
from typing import Optional, Tuple

from ..data.models import (
    FailureMode,
    LoadCase,
    PlanarFrame,
    SolverSettings,
    SolveStatus,
    StrengthReport,
)
from ..errors import DomainError, NoFailureError, SolverDivergedError
from ..solver.fem import solve_nonlinear

logger = logging.getLogger(__name__)

TRANSVERSE = (1.0, 0.0)


def strength_sweep(
    frame: PlanarFrame,
    direction: Tuple[float, float] = TRANSVERSE,
    settings: Optional[SolverSettings] = None,
) -> StrengthReport:
    """
    Push the fingertip along ``direction`` until first yield or buckling.

    The tip displacement component along the direction is prescribed; the
    orthogonal component and the tip rotation stay free. The sweep target
    starts at ``max_sweep_deflection`` and doubles up to
    ``sweep_extensions`` times if nothing fails. Force and deflection are
    interpolated at the threshold crossing between the last stable and the
    first failed increment.

    Raises:
        SolverDivergedError: if the path diverges before any failure
        NoFailureError: if no failure occurs within the extended target
    """
    settings = settings or SolverSettings()
    ny, nz = direction
    norm = math.hypot(ny, nz)
    if norm <= 0.0:
        raise DomainError("sweep direction has zero length")
    ny, nz = ny / norm, nz / norm

    target = settings.max_sweep_deflection
    steps = settings.strength_steps
    for attempt in range(settings.sweep_extensions + 1):
        load = LoadCase(directional_displacements={frame.tip_node: (ny, nz, target)}, steps=steps)
        result = solve_nonlinear(frame, load, settings)

        if result.status == SolveStatus.DIVERGED:
            last = result.history[-1] if result.history else None
            raise SolverDivergedError(
                f"strength sweep of {frame.label or 'frame'} diverged before failure: "
                f"{result.diagnostics}",
                step=len(result.history),
                residual=last.residual if last else None,
            )
        if result.status in (SolveStatus.YIELDED, SolveStatus.BUCKLED):
            stable, failed = result.history[-2], result.history[-1]
            lam = result.threshold_load_factor
            share = 0.0
            if failed.load_factor > stable.load_factor:
                share = (lam - stable.load_factor) / (failed.load_factor - stable.load_factor)
            share = min(max(share, 0.0), 1.0)

            def along(pair):
                return pair[0] * ny + pair[1] * nz

            force = along(stable.tip_reaction) + share * (
                along(failed.tip_reaction) - along(stable.tip_reaction)
            )
            deflection = lam * target
            mode = FailureMode.YIELD if result.status == SolveStatus.YIELDED else FailureMode.BUCKLING
            logger.info(
                f"Strength of {frame.label or 'frame'}: {mode.value} at "
                f"{deflection:.3f} mm, {force:.3f} N"
            )
            return StrengthReport(
                max_force=force,
                max_deflection=deflection,
                failure_mode=mode,
                direction=(ny, nz),
            )

        logger.info(
            f"No failure of {frame.label or 'frame'} up to {target:g} mm "
            f"(attempt {attempt + 1}); extending sweep"
        )
        target *= 2.0
        steps *= 2

    raise NoFailureError(
        f"no yield or buckling of {frame.label or 'frame'} up to {target / 2.0:g} mm"
    )
