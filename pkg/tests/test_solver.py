"""
Tests for the linear and corotational frame solvers against beam theory.
"""

import math

import numpy as np
import pytest

from finray_compliance.characterize.stiffness import identify_stiffness
from finray_compliance.data.models import (
    FrameElement,
    LoadCase,
    MaterialModel,
    PlanarFrame,
    SolverSettings,
    SolveStatus,
)
from finray_compliance.errors import DomainError, SingularSystemError
from finray_compliance.geometry.frame import build_frame
from finray_compliance.solver.fem import (
    assemble_stiffness,
    recover_stresses,
    solve_linear,
    solve_nonlinear,
    state_vector,
    tangent_min_eigenvalue,
)

from .conftest import rectangle


def random_frame(rng: np.random.Generator, material: MaterialModel) -> PlanarFrame:
    """Clamped random chain with a few cross braces."""
    count = int(rng.integers(3, 9))
    nodes = [(0.0, 0.0)]
    heading = rng.uniform(0.0, 2.0 * math.pi)
    for _ in range(count - 1):
        heading += rng.uniform(-1.2, 1.2)
        length = rng.uniform(5.0, 20.0)
        y, z = nodes[-1]
        nodes.append((y + length * math.cos(heading), z + length * math.sin(heading)))
    pairs = [(k, k + 1) for k in range(count - 1)]
    for _ in range(int(rng.integers(0, 3))):
        i, j = sorted(rng.choice(count, size=2, replace=False))
        if j - i > 1 and math.dist(nodes[i], nodes[j]) > 1.0 and (i, j) not in pairs:
            pairs.append((int(i), int(j)))
    elements = [
        FrameElement(
            node_i=i,
            node_j=j,
            section=rectangle(rng.uniform(0.4, 2.0), 15.0),
            material=material,
        )
        for i, j in pairs
    ]
    return PlanarFrame(nodes=nodes, elements=elements, supports=[0], tip_node=count - 1)


def random_forces(rng: np.random.Generator, frame: PlanarFrame) -> dict:
    return {
        node: tuple(float(v) for v in rng.uniform(-1.0, 1.0, size=2))
        for node in range(1, frame.node_count)
    }


def rotated(frame: PlanarFrame, forces: dict, angle: float):
    c, s = math.cos(angle), math.sin(angle)

    def turn(y: float, z: float) -> tuple:
        return (c * y - s * z, s * y + c * z)

    nodes = [turn(y, z) for y, z in frame.nodes]
    return frame.model_copy(update={"nodes": nodes}), {n: turn(*f) for n, f in forces.items()}


def bending_stiffness(frame: PlanarFrame) -> float:
    element = frame.elements[0]
    return element.material.youngs_modulus * element.section.second_moment


class TestLinear:
    @pytest.mark.parametrize("elements", [1, 4])
    def test_tip_force_deflection(self, cantilever, elements):
        frame = cantilever(length=100.0, elements=elements)
        force = 0.1
        result = solve_linear(frame, LoadCase(applied_forces={frame.tip_node: (force, 0.0)}))
        expected = force * 100.0 ** 3 / (3.0 * bending_stiffness(frame))
        assert result.status == SolveStatus.CONVERGED
        assert result.tip_displacement[0] == pytest.approx(expected, rel=1e-9)
        assert result.tip_displacement[1] == pytest.approx(0.0, abs=1e-12)

    def test_prescribed_tip_reaction(self, cantilever):
        frame = cantilever(length=50.0)
        delta = 0.5
        result = solve_linear(
            frame, LoadCase(prescribed_displacements={frame.tip_node: (delta, None)})
        )
        expected = 3.0 * bending_stiffness(frame) * delta / 50.0 ** 3
        assert result.tip_reaction[0] == pytest.approx(expected, rel=1e-9)
        # support reaction balances the tip reaction
        assert result.reactions[0][0] == pytest.approx(-expected, rel=1e-9)

    def test_axial_force(self, cantilever, pla):
        frame = cantilever(length=100.0, elements=2)
        result = solve_linear(frame, LoadCase(applied_forces={frame.tip_node: (0.0, 10.0)}))
        area = frame.elements[0].section.area
        assert result.tip_displacement[1] == pytest.approx(10.0 * 100.0 / (pla.youngs_modulus * area))

    def test_eigenvalue_positive_when_supported(self, cantilever):
        frame = cantilever(elements=4)
        result = solve_linear(frame, LoadCase(), with_eigenvalue=True)
        assert result.min_tangent_eigenvalue > 0.0

    def test_stiffness_matrix_is_symmetric(self, cantilever):
        K = assemble_stiffness(cantilever(elements=3)).toarray()
        assert abs(K - K.T).max() < 1e-9 * abs(K).max()

    def test_isolated_node_is_singular(self, pla):
        frame = PlanarFrame(
            nodes=[(0.0, 0.0), (0.0, 10.0), (5.0, 5.0)],
            elements=[FrameElement(node_i=0, node_j=1, section=rectangle(1.0, 10.0), material=pla)],
            supports=[0],
            tip_node=1,
        )
        with pytest.raises(SingularSystemError):
            solve_linear(frame, LoadCase(applied_forces={1: (1.0, 0.0)}))

    def test_prescribed_support_rejected(self, cantilever):
        frame = cantilever()
        with pytest.raises(DomainError):
            solve_linear(frame, LoadCase(prescribed_displacements={0: (1.0, None)}))

    def test_unknown_node_rejected(self, cantilever):
        frame = cantilever()
        with pytest.raises(DomainError):
            solve_linear(frame, LoadCase(applied_forces={7: (1.0, 0.0)}))


class TestNonlinear:
    def test_small_motion_matches_linear(self, cantilever):
        frame = cantilever(elements=4)
        load = LoadCase(prescribed_displacements={frame.tip_node: (0.01, None)}, steps=2)
        linear = solve_linear(frame, load)
        nonlinear = solve_nonlinear(frame, load)
        assert nonlinear.status == SolveStatus.CONVERGED
        assert not nonlinear.linear
        assert nonlinear.tip_reaction[0] == pytest.approx(linear.tip_reaction[0], rel=1e-3)
        assert len(nonlinear.history) == 3

    def test_euler_buckling(self, cantilever):
        # P_cr = pi^2 EI / (4 L^2); axial stiffness EA/L turns 0.01 mm into the load
        frame = cantilever(length=100.0, elements=8)
        load = LoadCase(prescribed_displacements={frame.tip_node: (None, -0.01)}, steps=20)
        result = solve_nonlinear(frame, load)

        element = frame.elements[0]
        ei = bending_stiffness(frame)
        ea = element.material.youngs_modulus * element.section.area
        critical = math.pi ** 2 * ei / (4.0 * 100.0 ** 2) / (ea / 100.0 * 0.01)

        assert result.status == SolveStatus.BUCKLED
        assert result.min_tangent_eigenvalue <= 0.0
        assert 0.18 < result.threshold_load_factor < 0.3
        assert result.threshold_load_factor == pytest.approx(critical, rel=0.1)
        # fields describe the last stable increment
        assert result.load_factor < result.threshold_load_factor

    def test_yield_stops_the_solve(self, cantilever):
        frame = cantilever(length=20.0, thickness=0.4, depth=15.0, elements=8)
        load = LoadCase(prescribed_displacements={frame.tip_node: (15.0, None)}, steps=20)
        result = solve_nonlinear(frame, load)
        assert result.status == SolveStatus.YIELDED
        assert result.max_abs_stress >= result.yield_strength
        assert 0.0 < result.threshold_load_factor < 1.0

    def test_stiffer_material_stiffer_frame(self, cantilever, pla):
        stiff = MaterialModel(**{**pla.model_dump(), "youngs_modulus": 2.0 * pla.youngs_modulus})
        settings = SolverSettings()
        load = LoadCase(prescribed_displacements={4: (0.1, None)}, steps=2)
        soft_result = solve_nonlinear(cantilever(elements=4), load, settings)
        stiff_result = solve_nonlinear(cantilever(elements=4, material=stiff), load, settings)
        assert stiff_result.tip_reaction[0] == pytest.approx(2.0 * soft_result.tip_reaction[0], rel=1e-6)


class TestRandomFrames:
    @pytest.mark.parametrize("seed", range(100))
    def test_equilibrium_energy_and_objectivity(self, pla, seed):
        rng = np.random.default_rng(seed)
        frame = random_frame(rng, pla)
        forces = random_forces(rng, frame)
        result = solve_linear(frame, LoadCase(applied_forces=forces))

        applied = np.sum(list(forces.values()), axis=0)
        reacted = np.sum(list(result.reactions.values()), axis=0)
        np.testing.assert_allclose(applied + reacted, 0.0, atol=1e-8)

        d = state_vector(result)
        strain_energy = d @ assemble_stiffness(frame).toarray() @ d
        work = sum(
            fy * result.displacements[n][0] + fz * result.displacements[n][1]
            for n, (fy, fz) in forces.items()
        )
        assert strain_energy == pytest.approx(work, rel=1e-8)

        angle = rng.uniform(0.0, 2.0 * math.pi)
        turned_frame, turned_forces = rotated(frame, forces, angle)
        turned = solve_linear(turned_frame, LoadCase(applied_forces=turned_forces))
        c, s = math.cos(angle), math.sin(angle)
        expected = np.asarray(result.displacements) @ np.array([[c, s], [-s, c]])
        scale = max(np.abs(expected).max(), 1e-12)
        np.testing.assert_allclose(turned.displacements, expected, atol=1e-8 * scale)
        spin = max(np.abs(result.rotations).max(), 1e-12)
        np.testing.assert_allclose(turned.rotations, result.rotations, atol=1e-8 * spin)


class TestMeshRefinement:
    def test_finger_stiffness_converges(self, design):
        coarse = identify_stiffness(build_frame(design, elems_per_member=2))
        fine = identify_stiffness(build_frame(design, elems_per_member=4))
        assert fine.kyy == pytest.approx(coarse.kyy, rel=0.01)
        assert fine.kzz == pytest.approx(coarse.kzz, rel=0.01)


class TestStateQueries:
    def test_root_fiber_stress(self, cantilever):
        frame = cantilever(length=100.0, elements=4)
        result = solve_linear(frame, LoadCase(applied_forces={frame.tip_node: (0.1, 0.0)}))
        stress = recover_stresses(frame, state_vector(result), linear=True)
        section = frame.elements[0].section
        # M = F L at the root, c = t / 2
        assert stress[0] == pytest.approx(0.1 * 100.0 * 0.5 / section.second_moment, rel=1e-9)
        assert list(stress) == sorted(stress, reverse=True)

    def test_unloaded_tangent_matches_linear(self, cantilever):
        frame = cantilever(elements=4)
        linear = solve_linear(frame, LoadCase(), with_eigenvalue=True)
        tangent = tangent_min_eigenvalue(frame, np.zeros(frame.dof_count))
        assert tangent == pytest.approx(linear.min_tangent_eigenvalue, rel=1e-9)

    def test_directional_constraint_along_axis(self, cantilever):
        frame = cantilever(length=50.0, elements=2)
        plain = solve_linear(frame, LoadCase(prescribed_displacements={frame.tip_node: (0.5, None)}))
        skew = solve_linear(
            frame, LoadCase(directional_displacements={frame.tip_node: (1.0, 0.0, 0.5)})
        )
        assert skew.tip_displacement[0] == pytest.approx(0.5)
        assert skew.tip_reaction[0] == pytest.approx(plain.tip_reaction[0], rel=1e-9)
