"""
Two-node corotational Euler-Bernoulli beam, vectorized over elements.

Element DOF order is (u_i, w_i, theta_i, u_j, w_j, theta_j) in global (y, z)
axes. The local deformation modes are axial stretch and the two end
rotations relative to the chord; the linear element is the same expression
evaluated in the undeformed state.
"""

from dataclasses import dataclass

import numpy as np

from ..data.models import PlanarFrame


@dataclass(frozen=True)
class ElementArrays:
    """Per-element geometry and section constants of a frame."""
    node_i: np.ndarray
    node_j: np.ndarray
    x0: np.ndarray  # (n, 2) start coordinates
    dx0: np.ndarray  # (n, 2) undeformed chord
    length: np.ndarray
    ea: np.ndarray
    ei: np.ndarray
    area: np.ndarray
    second_moment: np.ndarray
    half_thickness: np.ndarray
    rigid: np.ndarray
    yield_strength: np.ndarray
    dofs: np.ndarray  # (n, 6) global DOF indices

    @property
    def count(self) -> int:
        return len(self.length)


def element_arrays(frame: PlanarFrame) -> ElementArrays:
    nodes = np.asarray(frame.nodes, dtype=float)
    ni = np.array([e.node_i for e in frame.elements], dtype=int)
    nj = np.array([e.node_j for e in frame.elements], dtype=int)
    dx0 = nodes[nj] - nodes[ni]
    length = np.linalg.norm(dx0, axis=1)
    modulus = np.array([e.material.youngs_modulus for e in frame.elements])
    area = np.array([e.section.area for e in frame.elements])
    inertia = np.array([e.section.second_moment for e in frame.elements])
    dofs = np.column_stack([3 * ni, 3 * ni + 1, 3 * ni + 2, 3 * nj, 3 * nj + 1, 3 * nj + 2])
    return ElementArrays(
        node_i=ni,
        node_j=nj,
        x0=nodes[ni],
        dx0=dx0,
        length=length,
        ea=modulus * area,
        ei=modulus * inertia,
        area=area,
        second_moment=inertia,
        half_thickness=np.array([e.section.thickness / 2.0 for e in frame.elements]),
        rigid=np.array([e.rigid for e in frame.elements], dtype=bool),
        yield_strength=np.array([e.material.yield_strength for e in frame.elements]),
        dofs=dofs,
    )


@dataclass(frozen=True)
class ElementState:
    """Internal forces and tangent matrices of every element at a state."""
    axial: np.ndarray  # N
    moment_i: np.ndarray  # M1
    moment_j: np.ndarray  # M2
    forces: np.ndarray  # (n, 6) global internal force vectors
    tangent: np.ndarray  # (n, 6, 6)


def local_deformations(arrays: ElementArrays, d: np.ndarray, linear: bool = False):
    """
    Axial stretch and chord-relative end rotations.

    Returns:
        (u_l, theta_1, theta_2, current chord length, cos, sin)
    """
    de = d[arrays.dofs]
    L0 = arrays.length
    c0 = arrays.dx0[:, 0] / L0
    s0 = arrays.dx0[:, 1] / L0
    if linear:
        du = de[:, 3:5] - de[:, 0:2]
        u_l = c0 * du[:, 0] + s0 * du[:, 1]
        beta = (-s0 * du[:, 0] + c0 * du[:, 1]) / L0
        return u_l, de[:, 2] - beta, de[:, 5] - beta, L0, c0, s0

    chord = arrays.dx0 + de[:, 3:5] - de[:, 0:2]
    L = np.linalg.norm(chord, axis=1)
    c = chord[:, 0] / L
    s = chord[:, 1] / L
    alpha = np.arctan2(c0 * s - s0 * c, c0 * c + s0 * s)
    u_l = (L ** 2 - L0 ** 2) / (L + L0)
    return u_l, de[:, 2] - alpha, de[:, 5] - alpha, L, c, s


def element_state(arrays: ElementArrays, d: np.ndarray, linear: bool = False) -> ElementState:
    """
    Internal force vectors and tangent stiffness of every element.

    With ``linear`` the kinematics are linearized about the undeformed
    configuration and the tangent is the small-displacement stiffness.
    """
    L0 = arrays.length
    u_l, th1, th2, L, c, s = local_deformations(arrays, d, linear)

    N = arrays.ea * u_l / L0
    k_b = arrays.ei / L0
    M1 = k_b * (4.0 * th1 + 2.0 * th2)
    M2 = k_b * (2.0 * th1 + 4.0 * th2)

    n = arrays.count
    zeros = np.zeros(n)
    r = np.column_stack([-c, -s, zeros, c, s, zeros])
    z = np.column_stack([s, -c, zeros, -s, c, zeros])
    e3 = np.zeros((n, 6))
    e3[:, 2] = 1.0
    e6 = np.zeros((n, 6))
    e6[:, 5] = 1.0

    B = np.empty((n, 3, 6))
    B[:, 0, :] = r
    B[:, 1, :] = e3 - z / L[:, None]
    B[:, 2, :] = e6 - z / L[:, None]

    local = np.stack([N, M1, M2], axis=1)
    forces = np.einsum("nki,nk->ni", B, local)

    K_l = np.zeros((n, 3, 3))
    K_l[:, 0, 0] = arrays.ea / L0
    K_l[:, 1, 1] = 4.0 * k_b
    K_l[:, 1, 2] = 2.0 * k_b
    K_l[:, 2, 1] = 2.0 * k_b
    K_l[:, 2, 2] = 4.0 * k_b
    tangent = np.einsum("nki,nkl,nlj->nij", B, K_l, B)

    if not linear:
        zz = np.einsum("ni,nj->nij", z, z)
        rz = np.einsum("ni,nj->nij", r, z)
        tangent = tangent + (N / L)[:, None, None] * zz
        tangent = tangent + ((M1 + M2) / L ** 2)[:, None, None] * (rz + np.transpose(rz, (0, 2, 1)))

    return ElementState(axial=N, moment_i=M1, moment_j=M2, forces=forces, tangent=tangent)


def fiber_stress(arrays: ElementArrays, state: ElementState) -> np.ndarray:
    """Max outer-fiber stress per element: |N|/A + max(|M1|, |M2|) * (t/2) / I."""
    moment = np.maximum(np.abs(state.moment_i), np.abs(state.moment_j))
    return np.abs(state.axial) / arrays.area + moment * arrays.half_thickness / arrays.second_moment
