"""
Compliant connector insertion with open-loop mechanical search.
"""

from .contact import jamming_check
from .simulate import simulate_insert, viscous_force_estimate
from .window import tolerance_window

__all__ = [
    "jamming_check",
    "simulate_insert",
    "viscous_force_estimate",
    "tolerance_window",
]
