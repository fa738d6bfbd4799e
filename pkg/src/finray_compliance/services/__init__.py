"""
Service layer: result-wrapped facades over the domain modules.
"""

from .base import BaseService, ServiceResult
from .characterization_service import CharacterizationJob, CharacterizationService
from .design_service import DesignService
from .gateway import StudyGateway
from .insertion_service import DesignWindow, InsertionService, WindowJob

__all__ = [
    "BaseService",
    "ServiceResult",
    "CharacterizationJob",
    "CharacterizationService",
    "DesignService",
    "StudyGateway",
    "DesignWindow",
    "InsertionService",
    "WindowJob",
]
