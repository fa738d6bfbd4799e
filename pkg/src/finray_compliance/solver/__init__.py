"""
Planar corotational beam solver.
"""

from .fem import (
    assemble_stiffness,
    recover_stresses,
    smallest_eigenvalue,
    solve_linear,
    solve_nonlinear,
    state_vector,
    tangent_min_eigenvalue,
)

__all__ = [
    "assemble_stiffness",
    "recover_stresses",
    "smallest_eigenvalue",
    "solve_linear",
    "solve_nonlinear",
    "state_vector",
    "tangent_min_eigenvalue",
]
