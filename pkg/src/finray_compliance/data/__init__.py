"""
Domain types, the material registry and the bench reference dataset.
"""

from .materials import beam_section, builtin_material, list_materials, resolve_material, rib_spacing
from .models import (
    Axis,
    CalibrationAnchor,
    ConnectorTraits,
    Envelope,
    FingerDesign,
    Fingertip,
    InsertionScenario,
    LoadCase,
    MaterialModel,
    PlanarFrame,
    PrintParameters,
    SearchTrace,
    SolveResult,
    SolverSettings,
    StiffnessMatrix,
    StrategyParams,
    ToleranceWindow,
    ViscoelasticFit,
)

__all__ = [
    "beam_section",
    "builtin_material",
    "list_materials",
    "resolve_material",
    "rib_spacing",
    "Axis",
    "CalibrationAnchor",
    "ConnectorTraits",
    "Envelope",
    "FingerDesign",
    "Fingertip",
    "InsertionScenario",
    "LoadCase",
    "MaterialModel",
    "PlanarFrame",
    "PrintParameters",
    "SearchTrace",
    "SolveResult",
    "SolverSettings",
    "StiffnessMatrix",
    "StrategyParams",
    "ToleranceWindow",
    "ViscoelasticFit",
]
