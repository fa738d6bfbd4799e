"""
Utility functions and helpers.
"""

from .config import Config, get_config, reset_config
from .logging_config import setup_logging

__all__ = [
    "Config",
    "get_config",
    "reset_config",
    "setup_logging",
]
