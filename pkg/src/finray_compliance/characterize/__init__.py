"""
Virtual identification experiments on finger frames.
"""

from .stiffness import (
    apply_calibration,
    calibrate,
    directional_ratio,
    extrapolate_stiffness,
    identify_stiffness,
    principal_axis,
)
from .strength import strength_sweep
from .viscoelastic import fit_viscoelastic, viscoelastic_samples

__all__ = [
    "apply_calibration",
    "calibrate",
    "directional_ratio",
    "extrapolate_stiffness",
    "identify_stiffness",
    "principal_axis",
    "strength_sweep",
    "fit_viscoelastic",
    "viscoelastic_samples",
]
