"""
Tests for stiffness identification, calibration, strength sweeps and the
viscoelastic fit.
"""

import math

import numpy as np
import pytest

from finray_compliance.characterize.stiffness import (
    apply_calibration,
    calibrate,
    directional_ratio,
    extrapolate_stiffness,
    identify_stiffness,
    principal_axis,
)
from finray_compliance.characterize.strength import strength_sweep
from finray_compliance.characterize.viscoelastic import fit_viscoelastic, viscoelastic_samples
from finray_compliance.data.materials import builtin_material
from finray_compliance.data.models import (
    CalibrationAnchor,
    FailureMode,
    FingerDesign,
    MaterialModel,
    SolverSettings,
    StiffnessMatrix,
)
from finray_compliance.data.reference import (
    MEASURED_PRINCIPAL_ANGLES,
    calibration_deviation,
    measured_grid_points,
    measured_kyy,
)
from finray_compliance.errors import (
    AlreadyCalibratedError,
    DomainError,
    FitError,
    NoFailureError,
    NotPositiveDefiniteError,
    ElasticRangeError,
)
from finray_compliance.geometry.frame import build_frame


def material_like(base: MaterialModel, **update) -> MaterialModel:
    return MaterialModel(**{**base.model_dump(), **update})


class TestIdentifyStiffness:
    def test_cantilever_matches_beam_theory(self, cantilever, pla):
        frame = cantilever(length=100.0, elements=4)
        section = frame.elements[0].section
        matrix = identify_stiffness(frame, kxx_lumped=2.9)
        assert matrix.kyy == pytest.approx(3.0 * pla.youngs_modulus * section.second_moment / 100.0 ** 3, rel=1e-9)
        assert matrix.kzz == pytest.approx(pla.youngs_modulus * section.area / 100.0, rel=1e-9)
        assert matrix.kzy == pytest.approx(0.0, abs=1e-9)
        assert matrix.kxx == 2.9

    def test_amplitude_scale_does_not_change_linear_result(self, cantilever):
        frame = cantilever(elements=2)
        base = identify_stiffness(frame)
        scaled = identify_stiffness(frame, amplitude_scale=0.5)
        assert scaled.kyy == pytest.approx(base.kyy, rel=1e-9)

    def test_amplitude_beyond_elastic_range(self, cantilever, pla):
        weak = material_like(pla, yield_strength=1e-3, ultimate_strength=1e-3)
        with pytest.raises(ElasticRangeError):
            identify_stiffness(cantilever(material=weak))

    def test_finger_is_softer_transversely(self, design):
        matrix = identify_stiffness(build_frame(design))
        assert matrix.kzz > matrix.kyy > 0.0
        assert directional_ratio(matrix) == pytest.approx(matrix.kzz / matrix.kyy)

    def test_denser_infill_is_stiffer(self, pla):
        sparse = identify_stiffness(build_frame(FingerDesign(material=pla, infill_density=0.1)))
        dense = identify_stiffness(build_frame(FingerDesign(material=pla, infill_density=0.3)))
        assert dense.kyy > sparse.kyy


class TestPrincipalAxis:
    def test_uncoupled_matrix(self):
        axes = principal_axis(StiffnessMatrix(kxx=1.0, kyy=1.0, kzz=4.0))
        assert axes.angle_deg == pytest.approx(0.0)
        assert axes.soft_stiffness == pytest.approx(1.0)
        assert axes.stiff_stiffness == pytest.approx(4.0)

    def test_coupling_tilts_the_axis(self):
        matrix = StiffnessMatrix(kxx=1.0, kyy=1.2, kzz=40.0, kzy=2.0)
        expected = 0.5 * math.degrees(math.atan2(4.0, 38.8))
        assert principal_axis(matrix).angle_deg == pytest.approx(expected)
        assert principal_axis(matrix).angle_deg > 0.0

    def test_indefinite_matrix(self):
        matrix = StiffnessMatrix.model_construct(kxx=1.0, kyy=1.0, kzz=1.0, kzy=2.0)
        with pytest.raises(NotPositiveDefiniteError):
            principal_axis(matrix)


class TestExtrapolation:
    def test_line_through_two_points(self):
        result = extrapolate_stiffness([(0.0, 1.0), (20.0, 2.0)], 40.0)
        assert result.slope == pytest.approx(0.05)
        assert result.intercept == pytest.approx(1.0)
        assert result.value == pytest.approx(3.0)

    def test_forty_degree_cell_from_twenty_and_thirty(self):
        result = extrapolate_stiffness([(20.0, 1.533), (30.0, 1.667)], 40.0)
        assert round(result.slope, 4) == 0.0134
        assert round(result.value, 3) == 1.801

    def test_knot_returns_its_value(self):
        assert extrapolate_stiffness([(10.0, 1.05), (20.0, 1.533)], 20.0).value == 1.533

    @pytest.mark.parametrize(
        "points", [[(0.0, 1.0)], [(0.0, 1.0), (10.0, 2.0), (20.0, 3.0)], [(5.0, 1.0), (5.0, 2.0)]]
    )
    def test_invalid_points(self, points):
        with pytest.raises(DomainError):
            extrapolate_stiffness(points, 30.0)


class TestCalibration:
    def test_calibrated_anchor_reproduces_measurement(self, design):
        anchor = CalibrationAnchor(infill_direction=0.0, infill_density=0.1, measured_kyy=1.2)
        scale = calibrate(design, anchor)
        calibrated = design.model_copy(update={"material": apply_calibration(design.material, scale)})
        assert calibrated.material.calibrated
        assert calibrated.material.calibration_scale == pytest.approx(scale)
        assert identify_stiffness(build_frame(calibrated)).kyy == pytest.approx(1.2, rel=1e-6)

    def test_calibration_applies_once(self, pla):
        calibrated = apply_calibration(pla, 0.5)
        with pytest.raises(AlreadyCalibratedError):
            apply_calibration(calibrated, 0.5)
        design = FingerDesign(material=calibrated)
        with pytest.raises(AlreadyCalibratedError):
            calibrate(design, CalibrationAnchor(measured_kyy=1.2))

    def test_non_positive_scale(self, pla):
        with pytest.raises(DomainError):
            apply_calibration(pla, 0.0)


class TestStrength:
    def test_cantilever_yields_at_beam_theory_load(self, cantilever, pla):
        # M_y = sigma_y I / (t/2) at the root, F = M_y / L, delta = F L^3 / 3EI
        frame = cantilever(length=20.0, thickness=0.4, depth=15.0, elements=8)
        section = frame.elements[0].section
        force = pla.yield_strength * section.second_moment / 0.2 / 20.0
        deflection = force * 20.0 ** 3 / (3.0 * pla.youngs_modulus * section.second_moment)

        report = strength_sweep(frame)
        assert report.failure_mode == FailureMode.YIELD
        assert report.max_force == pytest.approx(force, rel=0.2)
        assert report.max_deflection == pytest.approx(deflection, rel=0.2)
        assert report.direction == (1.0, 0.0)

    def test_no_failure_within_sweep(self, cantilever, pla):
        strong = material_like(pla, yield_strength=1e6, ultimate_strength=1e6)
        settings = SolverSettings(max_sweep_deflection=1.0, sweep_extensions=0)
        with pytest.raises(NoFailureError):
            strength_sweep(cantilever(length=20.0, elements=4, material=strong), settings=settings)

    def test_zero_direction(self, cantilever):
        with pytest.raises(DomainError):
            strength_sweep(cantilever(), direction=(0.0, 0.0))


DIRECTIONS = (0.0, 10.0, 20.0, 30.0)
DENSITIES = (0.1, 0.2, 0.3)


@pytest.fixture(scope="module")
def calibrated_pla() -> MaterialModel:
    pla = builtin_material("PLA+")
    scale = calibrate(FingerDesign(material=pla), CalibrationAnchor(measured_kyy=1.2))
    return apply_calibration(pla, scale)


@pytest.fixture(scope="module")
def calibrated_grid(calibrated_pla):
    """Identified stiffness of every direction x density cell."""
    return {
        (direction, density): identify_stiffness(
            build_frame(
                FingerDesign(
                    material=calibrated_pla, infill_direction=direction, infill_density=density
                )
            )
        )
        for direction in DIRECTIONS
        for density in DENSITIES
    }


class TestCalibratedGrid:
    def test_bench_stiffness_within_thirty_percent(self, calibrated_grid):
        cells = [c for c in measured_grid_points() if c[0] == "PLA+" and c[1:] in calibrated_grid]
        assert len(cells) == 12
        for material, direction, density in cells:
            predicted = calibrated_grid[direction, density].kyy
            deviation = calibration_deviation(predicted, measured_kyy(material, direction, density))
            assert abs(deviation) <= 0.30, (direction, density, predicted)

    def test_stiffer_with_density_at_every_direction(self, calibrated_grid):
        for direction in DIRECTIONS:
            column = [calibrated_grid[direction, density].kyy for density in DENSITIES]
            assert np.all(np.diff(column) > 0.0), (direction, column)

    def test_anchor_cell_ratio(self, calibrated_grid):
        assert 14.0 <= directional_ratio(calibrated_grid[0.0, 0.1]) <= 36.0

    def test_principal_axis_turns_with_infill_direction(self, calibrated_grid):
        directions = sorted(MEASURED_PRINCIPAL_ANGLES)
        angles = [principal_axis(calibrated_grid[d, 0.1]).angle_deg for d in directions]
        assert np.all(np.diff(angles) > 0.0), angles
        assert all(1.0 <= angle <= 25.0 for angle in angles)


class TestStrengthTrends:
    @pytest.fixture(scope="class")
    def reports(self, calibrated_pla):
        cells = [(d, 0.1) for d in (0.0, 10.0, 20.0, 30.0, 40.0)] + [(0.0, 0.2), (0.0, 0.3)]
        return {
            (direction, density): strength_sweep(
                build_frame(
                    FingerDesign(
                        material=calibrated_pla, infill_direction=direction, infill_density=density
                    )
                )
            )
            for direction, density in cells
        }

    def test_sparse_finger_weakens_with_direction(self, reports):
        directions = (0.0, 10.0, 20.0, 30.0, 40.0)
        forces = [reports[d, 0.1].max_force for d in directions]
        deflections = [reports[d, 0.1].max_deflection for d in directions]
        assert np.all(np.diff(forces) < 0.0), forces
        assert np.all(np.diff(deflections) < 0.0), deflections

    def test_denser_finger_carries_more(self, reports):
        forces = [reports[0.0, density].max_force for density in DENSITIES]
        assert np.all(np.diff(forces) > 0.0), forces


class TestViscoelastic:
    def test_recovers_bench_values(self):
        fit = fit_viscoelastic(viscoelastic_samples(1.45, 0.055))
        assert fit.k == pytest.approx(1.45, rel=1e-9)
        assert fit.b == pytest.approx(0.055, rel=1e-9)
        assert fit.residual_rms == pytest.approx(0.0, abs=1e-9)

    def test_too_few_samples(self):
        with pytest.raises(FitError):
            fit_viscoelastic([(0.1, 1.0, 0.2), (0.2, 2.0, 0.4)])

    def test_negative_damping_refits_the_spring(self):
        samples = viscoelastic_samples(1.45, -0.05)
        data = np.asarray(samples)
        delta, force = data[:, 0], data[:, 2]
        spring_only = float(delta @ force / (delta @ delta))

        fit = fit_viscoelastic(samples)
        assert fit.b == 0.0
        assert fit.k == pytest.approx(spring_only, rel=1e-9)
        assert fit.k != pytest.approx(1.45, rel=1e-3)
        rms = float(np.sqrt(np.mean((force - spring_only * delta) ** 2)))
        assert fit.residual_rms == pytest.approx(rms, rel=1e-9)

    def test_single_velocity(self):
        samples = viscoelastic_samples(1.45, 0.055, velocities=[10.0])
        with pytest.raises(FitError):
            fit_viscoelastic(samples)


def test_calibration_deviation():
    assert calibration_deviation(1.32, 1.2) == pytest.approx(0.1)
    assert calibration_deviation(1.32, None) is None
    assert measured_kyy("PLA+", 20, 0.1) == 1.533
