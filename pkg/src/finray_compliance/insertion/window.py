"""
Misalignment tolerance windows by outward offset scans.
"""

import logging
from typing import Optional, Tuple

from ..data.models import Axis, InsertionScenario, Outcome, StrategyParams, ToleranceWindow
from ..errors import ContactResolutionError, DomainError
from .simulate import simulate_insert

logger = logging.getLogger(__name__)

DEFAULT_STEP = 0.5
SCAN_LIMIT = 30.0
DIVERGED = "diverged"


def _attempt(
    scenario: InsertionScenario, strategy: StrategyParams, axis: Axis, offset: float
) -> Tuple[bool, str]:
    try:
        trace = simulate_insert(scenario.with_offset(axis, offset), strategy, axis)
    except ContactResolutionError as e:
        logger.warning(f"Offset {offset:+.3f} mm on {axis.value} counted as failure: {e}")
        return False, DIVERGED
    return trace.outcome == Outcome.SUCCESS, trace.outcome.value


def tolerance_window(
    scenario: InsertionScenario,
    axis: Axis = Axis.Y,
    step: float = DEFAULT_STEP,
    strategy: Optional[StrategyParams] = None,
    limit: float = SCAN_LIMIT,
) -> ToleranceWindow:
    """
    Scan offsets k*step outward on each side until the first failure.

    The simulation is deterministic, so each offset is run once. A failure
    at zero offset gives an empty window at 0.

    Args:
        scenario: Scenario template; its offset on ``axis`` is replaced
        axis: Misalignment axis
        step: Grid spacing in mm
        strategy: Search trajectory parameters
        limit: Largest offset magnitude scanned

    Returns:
        ToleranceWindow with the outcome that ended each side
    """
    if step <= 0.0:
        raise DomainError(f"window step must be positive, got {step}")
    axis = Axis(axis)
    strategy = strategy or StrategyParams()

    ok, outcome = _attempt(scenario, strategy, axis, 0.0)
    if not ok:
        logger.info(f"Empty {axis.value} window: zero offset ends {outcome}")
        return ToleranceWindow(
            axis=axis,
            min_offset=0.0,
            max_offset=0.0,
            window=0.0,
            step=step,
            limiting_low=outcome,
            limiting_high=outcome,
        )

    edges, limiting = {}, {}
    for sign in (1, -1):
        edge, reason, k = 0.0, "limit", 1
        while k * step <= limit + 1e-9:
            offset = sign * k * step
            ok, outcome = _attempt(scenario, strategy, axis, offset)
            if not ok:
                reason = outcome
                break
            edge = offset
            k += 1
        edges[sign], limiting[sign] = edge, reason

    window = ToleranceWindow(
        axis=axis,
        min_offset=edges[-1],
        max_offset=edges[1],
        window=edges[1] - edges[-1],
        step=step,
        limiting_low=limiting[-1],
        limiting_high=limiting[1],
    )
    logger.info(
        f"{axis.value} window [{window.min_offset:+.3f}, {window.max_offset:+.3f}] mm "
        f"= {window.window:.3f} mm (limited by {window.limiting_outcome})"
    )
    return window
