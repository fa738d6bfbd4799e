"""
Filament materials and print-parameter to beam-section conversion.
"""

import logging
from typing import Dict, List, Optional

from ..errors import DomainError, UnknownMaterialError
from .models import MaterialModel, PrintParameters, SectionProperties

logger = logging.getLogger(__name__)


# PETG misses poisson_ratio and yield_strength in its datasheet; filled with
# nu = 0.37 and sigma_y = 0.9 * sigma_u.
_BUILTIN_MATERIALS: Dict[str, Dict[str, float]] = {
    "PLA+": {
        "youngs_modulus": 1900.0,
        "yield_strength": 20.04,
        "ultimate_strength": 20.9,
        "poisson_ratio": 0.36,
        "density": 1.14,
    },
    "PETG": {
        "youngs_modulus": 2050.0,
        "yield_strength": 45.0,
        "ultimate_strength": 50.0,
        "poisson_ratio": 0.37,
        "density": 1.27,
    },
}


def list_materials() -> List[str]:
    """Names of the builtin materials, sorted."""
    return sorted(_BUILTIN_MATERIALS)


def builtin_material(name: str) -> MaterialModel:
    """
    Look up a builtin filament material.

    Args:
        name: Registry name, e.g. "PLA+" or "PETG"

    Returns:
        MaterialModel with the tabulated properties

    Raises:
        UnknownMaterialError: if the name is not registered
    """
    if name not in _BUILTIN_MATERIALS:
        raise UnknownMaterialError(name, list_materials())
    return MaterialModel(name=name, **_BUILTIN_MATERIALS[name])


def resolve_material(name: str, overrides: Optional[Dict[str, Dict[str, float]]] = None) -> MaterialModel:
    """
    Builtin material with config overrides applied on top.

    A name that is not builtin resolves only when its override block gives
    every MaterialModel field.
    """
    block = dict((overrides or {}).get(name, {}))
    if name in _BUILTIN_MATERIALS:
        fields = {**_BUILTIN_MATERIALS[name], **block}
        if block:
            logger.info(f"Material {name} overridden: {sorted(block)}")
        return MaterialModel(name=name, **fields)

    required = {"youngs_modulus", "yield_strength", "ultimate_strength", "poisson_ratio", "density"}
    if not block or not required.issubset(block):
        available = list_materials() + sorted(overrides or {})
        raise UnknownMaterialError(name, sorted(set(available)))
    return MaterialModel(name=name, **block)


def rib_spacing(density: float, params: PrintParameters) -> float:
    """
    Perpendicular rib pitch for lines infill: one line of ``line_width`` per pitch.

    Raises:
        DomainError: if density is outside (0, 1]
    """
    if not 0.0 < density <= 1.0:
        raise DomainError(f"infill density must be in (0, 1], got {density}")
    return params.line_width / density


def beam_section(params: PrintParameters, thickness: Optional[float] = None) -> SectionProperties:
    """
    Rectangular section of an extruded member.

    Args:
        params: Print parameters; ``layer_depth`` is the out-of-plane depth
        thickness: In-plane thickness, defaults to one line width

    Returns:
        SectionProperties with area = t*d and second_moment = d*t^3/12
    """
    t = params.line_width if thickness is None else thickness
    if t <= 0:
        raise DomainError(f"section thickness must be positive, got {t}")
    d = params.layer_depth
    return SectionProperties(thickness=t, depth=d, area=t * d, second_moment=d * t ** 3 / 12.0)
