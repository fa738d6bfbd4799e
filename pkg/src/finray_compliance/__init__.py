"""
Finray Compliance Toolkit

Parametric planar beam-frame models of 3D-printed finray-effect fingers:
directional fingertip stiffness, remote center of compliance, strength limits,
and quasi-static connector insertion with mechanical search.
"""

__version__ = "1.0.0"
__author__ = "Finray Compliance Team"
