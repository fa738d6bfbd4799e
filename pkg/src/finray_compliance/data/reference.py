"""
Bench measurements of printed fingers, used as a read-only reference dataset.

Keys are (material, infill_direction_deg, infill_density). Reports use these
to fill the measured/deviation columns; nothing in the model is tuned to them
apart from the single calibration anchor. All cells were printed for a 10 deg
mount.
"""

from typing import Dict, List, Optional, Tuple

Cell = Tuple[str, float, float]

# Transverse stiffness kyy [N/mm]
MEASURED_KYY: Dict[Cell, float] = {
    ("PETG", 0.0, 0.10): 0.50,
    ("PETG", 0.0, 0.20): 1.133,
    ("PETG", 0.0, 0.30): 1.60,
    ("PLA+", 0.0, 0.10): 1.2,
    ("PLA+", 0.0, 0.20): 1.95,
    ("PLA+", 0.0, 0.25): 2.20,
    ("PLA+", 0.0, 0.30): 3.00,
    ("PLA+", 10.0, 0.10): 1.05,
    ("PLA+", 10.0, 0.20): 2.10,
    ("PLA+", 10.0, 0.30): 3.00,
    ("PLA+", 20.0, 0.10): 1.533,
    ("PLA+", 20.0, 0.20): 2.60,
    ("PLA+", 20.0, 0.30): 3.2,
    ("PLA+", 30.0, 0.10): 1.667,
    ("PLA+", 30.0, 0.15): 3.00,
    ("PLA+", 30.0, 0.20): 3.00,
    ("PLA+", 30.0, 0.25): 3.20,
    ("PLA+", 30.0, 0.30): 3.70,
    # 40 deg at low density buckled on the bench
    ("PLA+", 40.0, 0.10): 0.85,
    ("PLA+", 40.0, 0.15): 1.22,
    ("PLA+", 40.0, 0.20): 3.4,
    ("PLA+", 40.0, 0.25): 3.6,
    ("PLA+", 40.0, 0.30): 3.84,
}

# Robustness runs, y axis, 10 deg mount: tolerated misalignment range [mm]; None = failure
MEASURED_Y_WINDOW: Dict[Cell, Optional[float]] = {
    ("PLA+", 0.0, 0.10): 5.5,
    ("PLA+", 0.0, 0.20): 5.0,
    ("PLA+", 0.0, 0.30): 4.5,
    ("PETG", 0.0, 0.10): 7.5,
    ("PETG", 0.0, 0.20): 6.0,
    ("PETG", 0.0, 0.30): 5.5,
    ("PLA+", 10.0, 0.10): 5.5,
    ("PLA+", 20.0, 0.10): 5.0,
    ("PLA+", 30.0, 0.10): 4.0,
    ("PLA+", 30.0, 0.15): 5.5,
    ("PLA+", 30.0, 0.20): 5.5,
    ("PLA+", 30.0, 0.25): 5.5,
    ("PLA+", 30.0, 0.30): 6.0,
    ("PLA+", 40.0, 0.10): None,
    ("PLA+", 40.0, 0.15): None,
    ("PLA+", 40.0, 0.20): None,
    ("PLA+", 40.0, 0.25): 2.0,
    ("PLA+", 40.0, 0.30): 5.5,
}

# Single-finger constants measured on the 0 deg / 10 % PLA+ finger
MEASURED_KXX = 2.9
MEASURED_PRINCIPAL_ANGLES = {0.0: 3.6, 10.0: 9.5, 20.0: 14.6}
MEASURED_VISCOELASTIC = {"k": 1.45, "b": 0.055}


def _key(material: str, infill_direction: float, infill_density: float) -> Cell:
    return (material, round(float(infill_direction), 6), round(float(infill_density), 6))


def _lookup(table: Dict[Cell, Optional[float]], material, direction, density) -> Optional[float]:
    return table.get(_key(material, direction, density))


def measured_kyy(material: str, infill_direction: float, infill_density: float) -> Optional[float]:
    return _lookup(MEASURED_KYY, material, infill_direction, infill_density)


def measured_y_window(
    material: str, infill_direction: float, infill_density: float
) -> Optional[float]:
    """Bench y window; None when the cell was not run or its runs failed."""
    return _lookup(MEASURED_Y_WINDOW, material, infill_direction, infill_density)


def measured_grid_points(max_direction: float = 30.0) -> List[Cell]:
    """Populated stiffness cells up to ``max_direction``, sorted."""
    return sorted(cell for cell in MEASURED_KYY if cell[1] <= max_direction)


def calibration_deviation(predicted: float, reference: Optional[float]) -> Optional[float]:
    """
    Relative deviation (predicted - reference) / reference.

    Returns None when there is no reference value.
    """
    if reference is None or reference == 0:
        return None
    return (predicted - reference) / reference
