"""
Spring-damper fit F = k*delta + b*delta_dot to rate-dependent bench data.
"""

import logging
from typing import List, Optional, Sequence, Tuple

import numpy as np

from ..data.models import ViscoelasticFit
from ..errors import FitError

logger = logging.getLogger(__name__)

Sample = Tuple[float, float, float]

RAMP_VELOCITIES = (2.0, 5.0, 10.0, 15.0)
RAMP_STROKE = 4.0


def fit_viscoelastic(samples: Sequence[Sample]) -> ViscoelasticFit:
    """
    Ordinary least squares of force on [displacement, velocity].

    Args:
        samples: (displacement mm, velocity mm/s, force N) triples

    Returns:
        ViscoelasticFit; a negative damping estimate is clipped to 0 and k
        refitted on displacement alone

    Raises:
        FitError: for fewer than 3 samples, fewer than 2 distinct velocities
            or a rank-deficient regressor
    """
    data = np.asarray(samples, dtype=float)
    if data.ndim != 2 or data.shape[1] != 3 or len(data) < 3:
        raise FitError(f"need at least 3 (displacement, velocity, force) samples, got {len(data)}")
    if len(np.unique(data[:, 1])) < 2:
        raise FitError("samples span a single velocity; damping is not identifiable")
    regressor, force = data[:, :2], data[:, 2]
    if np.linalg.matrix_rank(regressor) < 2:
        raise FitError("regressor [displacement, velocity] is rank deficient")

    (k, b), *_ = np.linalg.lstsq(regressor, force, rcond=None)
    if b < 0.0:
        logger.warning(f"Negative damping estimate {b:.4g} N*s/mm clipped to 0")
        # refit the spring alone so k is the constrained optimum
        (k,), *_ = np.linalg.lstsq(regressor[:, :1], force, rcond=None)
        b = 0.0
    if k <= 0.0:
        raise FitError(f"fitted stiffness {k:.4g} N/mm is not positive")
    residual = force - regressor @ np.array([k, b])
    rms = float(np.sqrt(np.mean(residual ** 2)))
    logger.info(f"Viscoelastic fit: k={k:.4f} N/mm b={b:.4f} N*s/mm rms={rms:.3e} N")
    return ViscoelasticFit(k=float(k), b=float(b), residual_rms=rms)


def viscoelastic_samples(
    k: float,
    b: float,
    velocities: Optional[Sequence[float]] = None,
    stroke: float = RAMP_STROKE,
    points_per_ramp: int = 8,
) -> List[Sample]:
    """
    Noise-free ramp samples: a stroke loaded at several constant velocities.
    """
    samples = []
    for velocity in velocities or RAMP_VELOCITIES:
        for delta in np.linspace(stroke / points_per_ramp, stroke, points_per_ramp):
            samples.append((float(delta), float(velocity), float(k * delta + b * velocity)))
    return samples
