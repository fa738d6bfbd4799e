"""
Virtual stiffness identification of a finger frame.

Each load case prescribes one fingertip translation and leaves the other
translation and the tip rotation free, so the identified entries are the
apparent (directional) stiffnesses a rigid bench fixture would measure.
"""

import logging
import math
from typing import Optional, Sequence, Tuple

import numpy as np

from ..data.models import (
    CalibrationAnchor,
    FingerDesign,
    LoadCase,
    MaterialModel,
    PlanarFrame,
    PrincipalAxes,
    SolverSettings,
    SolveStatus,
    StiffnessExtrapolation,
    StiffnessMatrix,
)
from ..data.reference import MEASURED_KXX
from ..errors import AlreadyCalibratedError, DomainError, NotPositiveDefiniteError, ElasticRangeError
from ..geometry.frame import build_frame
from ..solver.fem import solve_linear, solve_nonlinear

logger = logging.getLogger(__name__)

_coupling_convention_logged = False


def _displace_tip(frame: PlanarFrame, axis: str, amplitudes: Sequence[float], settings: SolverSettings):
    """Signed amplitudes, reaction along the driven axis and motion of the free axis."""
    driven, free = (0, 1) if axis == "y" else (1, 0)
    deltas, forces, cross = [], [], []
    for amplitude in amplitudes:
        for sign in (1.0, -1.0):
            value = sign * amplitude
            prescribed = (value, None) if axis == "y" else (None, value)
            load = LoadCase(
                prescribed_displacements={frame.tip_node: prescribed},
                steps=settings.stiffness_steps,
            )
            if settings.nonlinear_stiffness:
                result = solve_nonlinear(frame, load, settings)
                if result.status != SolveStatus.CONVERGED:
                    raise ElasticRangeError(
                        amplitude, axis, result.max_abs_stress, result.yield_strength or 0.0
                    )
            else:
                result = solve_linear(frame, load, settings)
            limit = result.yield_strength
            if limit is not None and result.max_abs_stress >= limit:
                raise ElasticRangeError(amplitude, axis, result.max_abs_stress, limit)
            deltas.append(result.tip_displacement[driven])
            forces.append(result.tip_reaction[driven])
            cross.append(result.tip_displacement[free])
    return np.array(deltas), np.array(forces), np.array(cross)


def _slope_through_origin(x: np.ndarray, y: np.ndarray) -> float:
    solution, *_ = np.linalg.lstsq(x[:, None], y, rcond=None)
    return float(solution[0])


def identify_stiffness(
    frame: PlanarFrame,
    settings: Optional[SolverSettings] = None,
    kxx_lumped: float = MEASURED_KXX,
    amplitude_scale: float = 1.0,
) -> StiffnessMatrix:
    """
    Identify the fingertip stiffness matrix by least squares over tip displacements.

    Args:
        frame: Finger frame
        settings: Displacement amplitudes and solver settings
        kxx_lumped: Out-of-plane stiffness, not resolvable in the plane
        amplitude_scale: Multiplier applied to every displacement amplitude

    Returns:
        StiffnessMatrix with apparent kyy, kzz and the symmetric coupling kzy

    Raises:
        ElasticRangeError: if any load case leaves the elastic range
    """
    global _coupling_convention_logged
    settings = settings or SolverSettings()
    amps_y = [a * amplitude_scale for a in settings.amplitudes_y]
    amps_z = [a * amplitude_scale for a in settings.amplitudes_z]

    dy, fy, dz_of_y = _displace_tip(frame, "y", amps_y, settings)
    dz, fz, dy_of_z = _displace_tip(frame, "z", amps_z, settings)

    kyy = _slope_through_origin(dy, fy)
    kzz = _slope_through_origin(dz, fz)
    if kyy <= 0.0 or kzz <= 0.0:
        raise NotPositiveDefiniteError(f"identified kyy={kyy:.4g}, kzz={kzz:.4g} not positive")
    coupling_from_y = kzz * _slope_through_origin(dy, dz_of_y)
    coupling_from_z = kyy * _slope_through_origin(dz, dy_of_z)
    kzy = 0.5 * (coupling_from_y + coupling_from_z)

    if not _coupling_convention_logged:
        logger.warning(
            "Stiffness coupling reported in symmetric form K2 = [[kyy, kzy], [kzy, kzz]]; "
            "the antisymmetric -kzy entry of the printed matrix is not used"
        )
        _coupling_convention_logged = True

    matrix = StiffnessMatrix(kxx=kxx_lumped, kyy=kyy, kzz=kzz, kzy=kzy)
    logger.info(
        f"Identified {frame.label or 'frame'}: kyy={kyy:.4f} kzz={kzz:.4f} kzy={kzy:.4f} N/mm"
    )
    return matrix


def directional_ratio(matrix: StiffnessMatrix) -> float:
    """Assembly-direction over transverse stiffness, kzz / kyy."""
    return matrix.kzz / matrix.kyy


def principal_axis(matrix: StiffnessMatrix) -> PrincipalAxes:
    """
    Principal axes of K2.

    Returns:
        Angle of the stiff principal axis from z in degrees,
        theta = 1/2 atan2(2 kzy, kzz - kyy), and both eigenvalues
    """
    K2 = np.array([[matrix.kyy, matrix.kzy], [matrix.kzy, matrix.kzz]])
    eigenvalues = np.linalg.eigh(K2)[0]
    if eigenvalues[0] <= 0.0:
        raise NotPositiveDefiniteError(f"K2 eigenvalues {eigenvalues.tolist()} not all positive")
    angle = 0.5 * math.degrees(math.atan2(2.0 * matrix.kzy, matrix.kzz - matrix.kyy))
    return PrincipalAxes(
        angle_deg=angle,
        soft_stiffness=float(eigenvalues[0]),
        stiff_stiffness=float(eigenvalues[1]),
    )


def extrapolate_stiffness(
    points: Sequence[Tuple[float, float]], target_angle: float
) -> StiffnessExtrapolation:
    """
    Straight line K = a*x + b through two (angle, stiffness) points.

    Raises:
        DomainError: unless exactly two points with distinct angles are given
    """
    if len(points) != 2:
        raise DomainError(f"extrapolation needs exactly 2 points, got {len(points)}")
    (x1, k1), (x2, k2) = points
    if x1 == x2:
        raise DomainError(f"extrapolation points share the angle {x1}")
    slope = (k2 - k1) / (x2 - x1)
    intercept = k1 - slope * x1
    # evaluate from the nearer knot so a knot returns its own value
    x0, k0 = min(points, key=lambda p: abs(p[0] - target_angle))
    return StiffnessExtrapolation(
        value=k0 + slope * (target_angle - x0),
        slope=slope,
        intercept=intercept,
    )


# ============ Calibration ============

def anchor_design(design: FingerDesign, anchor: CalibrationAnchor) -> FingerDesign:
    """The anchor cell expressed as a design of the same material and envelope."""
    update = {
        "infill_direction": anchor.infill_direction,
        "infill_density": anchor.infill_density,
    }
    if anchor.fingertip is not None:
        update["fingertip"] = anchor.fingertip
    if anchor.mount_angle is not None:
        update["mount_angle"] = anchor.mount_angle
    return design.model_copy(update=update)


def calibrate(
    design: FingerDesign,
    anchor: CalibrationAnchor,
    settings: Optional[SolverSettings] = None,
) -> float:
    """
    Effective-modulus scale that makes the anchor cell reproduce its measured kyy.

    Args:
        design: Any design of the material to calibrate
        anchor: Anchor cell and its measured transverse stiffness

    Returns:
        Multiplicative modulus scale

    Raises:
        AlreadyCalibratedError: if the design's material already carries a calibration
        DomainError: if the anchor's predicted stiffness is not positive
    """
    if design.material.calibrated:
        raise AlreadyCalibratedError(
            f"material {design.material.name} already calibrated "
            f"(scale {design.material.calibration_scale:.6g})"
        )
    if anchor.measured_kyy <= 0.0:
        raise DomainError(f"measured kyy must be positive, got {anchor.measured_kyy}")
    settings = settings or SolverSettings()
    reference = anchor_design(design, anchor)
    frame = build_frame(reference, settings.elems_per_member, settings.min_element_length)
    predicted = identify_stiffness(frame, settings).kyy
    if predicted <= 0.0:
        raise DomainError(f"predicted anchor stiffness {predicted} is not positive")
    scale = anchor.measured_kyy / predicted
    logger.info(
        f"Calibrated {design.material.name}: predicted {predicted:.4f} N/mm, "
        f"measured {anchor.measured_kyy:.4f} N/mm, modulus scale {scale:.6f}"
    )
    return scale


def apply_calibration(material: MaterialModel, scale: float) -> MaterialModel:
    """
    Calibrated copy of a material.

    Raises:
        AlreadyCalibratedError: if the material was calibrated before
    """
    if material.calibrated:
        raise AlreadyCalibratedError(f"material {material.name} already calibrated")
    if scale <= 0.0:
        raise DomainError(f"calibration scale must be positive, got {scale}")
    return material.scaled(scale).model_copy(update={"calibrated": True})

