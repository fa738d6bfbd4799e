"""
Planar frame solver: sparse assembly, linear and incremental Newton solves,
tangent-stiffness stability monitoring and stress recovery.

Constraints are applied by eliminating DOFs. Skew (directional) tip
constraints rotate the node's translational DOFs so that one component lies
along the prescribed direction; the solve runs in those transformed
coordinates and results are mapped back.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.sparse.linalg import eigsh, splu

from ..data.models import LoadCase, PlanarFrame, SolveResult, SolverSettings, SolveStatus, StepRecord
from ..errors import DomainError, SingularSystemError
from .element import ElementArrays, ElementState, element_arrays, element_state, fiber_stress

logger = logging.getLogger(__name__)

ABSOLUTE_RESIDUAL_FLOOR = 1e-12
PIVOT_RATIO_LIMIT = 1e-13


# ============ Assembly ============

def _assemble(arrays: ElementArrays, state: ElementState, n_dof: int) -> Tuple[sp.csr_matrix, np.ndarray]:
    rows = np.repeat(arrays.dofs, 6, axis=1).ravel()
    cols = np.tile(arrays.dofs, (1, 6)).ravel()
    K = sp.coo_matrix((state.tangent.ravel(), (rows, cols)), shape=(n_dof, n_dof)).tocsr()
    f_int = np.zeros(n_dof)
    np.add.at(f_int, arrays.dofs.ravel(), state.forces.ravel())
    return K, f_int


def assemble_stiffness(frame: PlanarFrame, displacements: Optional[np.ndarray] = None,
                       linear: bool = True) -> sp.csr_matrix:
    """Unconstrained global stiffness (linear) or tangent stiffness at a state."""
    arrays = element_arrays(frame)
    d = np.zeros(frame.dof_count) if displacements is None else np.asarray(displacements, float)
    K, _ = _assemble(arrays, element_state(arrays, d, linear=linear), frame.dof_count)
    return K


@dataclass
class _ConstrainedSystem:
    """DOF partition and skew transformation of a frame under a load case."""
    n_dof: int
    transform: sp.csr_matrix
    free: np.ndarray
    fixed: np.ndarray
    fixed_targets: np.ndarray
    f_ext: np.ndarray
    constrained_nodes: List[int]

    def reduce(self, K: sp.csr_matrix) -> sp.csr_matrix:
        return (self.transform.T @ K @ self.transform).tocsr()

    def to_global(self, q: np.ndarray) -> np.ndarray:
        return self.transform @ q


def _constrain(frame: PlanarFrame, load: LoadCase) -> _ConstrainedSystem:
    n_nodes = frame.node_count
    n_dof = frame.dof_count
    referenced = (
        set(load.prescribed_displacements)
        | set(load.directional_displacements)
        | set(load.prescribed_rotations)
        | set(load.applied_forces)
    )
    for node in referenced:
        if not 0 <= node < n_nodes:
            raise DomainError(f"load case references node {node}, frame has {n_nodes} nodes")
    supports = set(frame.supports)
    for node in set(load.prescribed_displacements) | set(load.directional_displacements):
        if node in supports:
            raise DomainError(f"node {node} is a support and cannot take a prescribed motion")
    overlap = set(load.prescribed_displacements) & set(load.directional_displacements)
    if overlap:
        raise DomainError(f"nodes {sorted(overlap)} have both axis and directional prescriptions")

    rows, cols, vals = list(range(n_dof)), list(range(n_dof)), [1.0] * n_dof
    targets: Dict[int, float] = {}
    for node in supports:
        for k in range(3):
            targets[3 * node + k] = 0.0
    for node, (dy, dz) in load.prescribed_displacements.items():
        if dy is not None:
            targets[3 * node] = float(dy)
        if dz is not None:
            targets[3 * node + 1] = float(dz)
    for node, rotation in load.prescribed_rotations.items():
        targets[3 * node + 2] = float(rotation)
    for node, (ny, nz, value) in load.directional_displacements.items():
        u, w = 3 * node, 3 * node + 1
        # block [[ny, -nz], [nz, ny]]: first reduced DOF along (ny, nz)
        vals[u], vals[w] = ny, ny
        rows.extend([u, w])
        cols.extend([w, u])
        vals.extend([-nz, nz])
        targets[u] = float(value)

    transform = sp.coo_matrix((vals, (rows, cols)), shape=(n_dof, n_dof)).tocsr()
    f_ext = np.zeros(n_dof)
    for node, (fy, fz) in load.applied_forces.items():
        f_ext[3 * node] += fy
        f_ext[3 * node + 1] += fz

    fixed = np.array(sorted(targets), dtype=int)
    free = np.setdiff1d(np.arange(n_dof), fixed)
    constrained_nodes = sorted(
        supports | set(load.prescribed_displacements) | set(load.directional_displacements)
    )
    return _ConstrainedSystem(
        n_dof=n_dof,
        transform=transform,
        free=free,
        fixed=fixed,
        fixed_targets=np.array([targets[i] for i in fixed], dtype=float),
        f_ext=f_ext,
        constrained_nodes=constrained_nodes,
    )


def _factor_solve(K_ff: sp.spmatrix, rhs: np.ndarray) -> np.ndarray:
    if K_ff.shape[0] == 0:
        return np.zeros(0)
    try:
        lu = splu(sp.csc_matrix(K_ff))
    except RuntimeError as exc:
        raise SingularSystemError(f"stiffness matrix is singular: {exc}") from exc
    pivots = np.abs(lu.U.diagonal())
    if pivots.size and pivots.min() <= PIVOT_RATIO_LIMIT * pivots.max():
        raise SingularSystemError(
            f"stiffness matrix is singular (pivot ratio {pivots.min() / pivots.max():.2e}); "
            "frame is a mechanism or under-constrained"
        )
    x = lu.solve(rhs)
    if not np.all(np.isfinite(x)):
        raise SingularSystemError("non-finite solution; frame is a mechanism or under-constrained")
    return x


# ============ Eigenvalues ============

def smallest_eigenvalue(matrix, dense_limit: int = 2000) -> float:
    """
    Smallest eigenvalue of a symmetric matrix.

    Dense matrices and small sparse ones use a full symmetric solve; larger
    sparse ones use shift-invert Lanczos about zero.
    """
    n = matrix.shape[0]
    if n == 0:
        return float("inf")
    if not sp.issparse(matrix) or n <= dense_limit:
        dense = matrix.toarray() if sp.issparse(matrix) else np.asarray(matrix, dtype=float)
        return float(scipy.linalg.eigh(dense, eigvals_only=True, subset_by_index=[0, 0])[0])
    scale = float(abs(matrix.diagonal()).max())
    values = eigsh(sp.csc_matrix(matrix), k=1, sigma=-1e-9 * scale, which="LM",
                   return_eigenvectors=False)
    return float(values[0])


def _reduced_min_eigenvalue(system: _ConstrainedSystem, K: sp.csr_matrix, dense_limit: int) -> float:
    K_red = system.reduce(K)
    K_ff = K_red[system.free][:, system.free]
    return smallest_eigenvalue(K_ff, dense_limit)


def tangent_min_eigenvalue(
    frame: PlanarFrame,
    displacements: np.ndarray,
    load: Optional[LoadCase] = None,
    settings: Optional[SolverSettings] = None,
) -> float:
    """
    Smallest eigenvalue of the constrained tangent stiffness at a state.

    Args:
        frame: Frame
        displacements: Full DOF vector (u, w, theta per node)
        load: Load case whose constraints apply (supports only if omitted)
        settings: Solver settings (dense/sparse eigen-solve switch)

    Returns:
        Eigenvalue in N/mm; negative values are reported as they are
    """
    settings = settings or SolverSettings()
    system = _constrain(frame, load or LoadCase())
    arrays = element_arrays(frame)
    K, _ = _assemble(arrays, element_state(arrays, np.asarray(displacements, float)), frame.dof_count)
    return _reduced_min_eigenvalue(system, K, settings.dense_eigen_limit)


# ============ Stresses ============

def recover_stresses(frame: PlanarFrame, displacements: np.ndarray, linear: bool = False) -> np.ndarray:
    """
    Maximum fiber stress per element (MPa); rigid links report 0.

    Args:
        frame: Frame
        displacements: Full DOF vector
        linear: Use small-displacement kinematics
    """
    arrays = element_arrays(frame)
    state = element_state(arrays, np.asarray(displacements, float), linear=linear)
    stress = fiber_stress(arrays, state)
    stress[arrays.rigid] = 0.0
    return stress


def state_vector(result: SolveResult) -> np.ndarray:
    """Full DOF vector of a solve result."""
    d = np.zeros(3 * len(result.displacements))
    disp = np.asarray(result.displacements, dtype=float)
    d[0::3] = disp[:, 0]
    d[1::3] = disp[:, 1]
    d[2::3] = np.asarray(result.rotations, dtype=float)
    return d


# ============ Solves ============

@dataclass
class _State:
    d: np.ndarray
    f_int: np.ndarray
    stress: np.ndarray
    load_factor: float
    eigenvalue: Optional[float] = None
    residual: float = 0.0
    iterations: int = 0


def _evaluate(arrays, d, linear):
    state = element_state(arrays, d, linear=linear)
    stress = fiber_stress(arrays, state)
    stress[arrays.rigid] = 0.0
    return state, stress


def _yield_ratio(arrays: ElementArrays, stress: np.ndarray) -> float:
    if not np.any(~arrays.rigid):
        return 0.0
    return float(np.max(stress[~arrays.rigid] / arrays.yield_strength[~arrays.rigid]))


def _node_pair(vector: np.ndarray, node: int) -> Tuple[float, float]:
    return (float(vector[3 * node]), float(vector[3 * node + 1]))


def _record(frame, step, state: _State) -> StepRecord:
    return StepRecord(
        step=step,
        load_factor=state.load_factor,
        tip_displacement=_node_pair(state.d, frame.tip_node),
        tip_reaction=_node_pair(state.f_int, frame.tip_node),
        max_abs_stress=float(state.stress.max(initial=0.0)),
        min_tangent_eigenvalue=state.eigenvalue,
        iterations=state.iterations,
        residual=state.residual,
    )


def _build_result(
    frame: PlanarFrame,
    system: _ConstrainedSystem,
    arrays: ElementArrays,
    state: _State,
    status: SolveStatus,
    linear: bool,
    history: Optional[List[StepRecord]] = None,
    max_abs_stress: Optional[float] = None,
    min_eigenvalue: Optional[float] = None,
    threshold: Optional[float] = None,
    diagnostics: str = "",
) -> SolveResult:
    reaction = state.f_int - state.load_factor * system.f_ext
    reactions = {node: _node_pair(reaction, node) for node in system.constrained_nodes}
    d = state.d
    return SolveResult(
        status=status,
        linear=linear,
        displacements=[(float(d[3 * n]), float(d[3 * n + 1])) for n in range(frame.node_count)],
        rotations=[float(d[3 * n + 2]) for n in range(frame.node_count)],
        reactions=reactions,
        tip_displacement=_node_pair(d, frame.tip_node),
        tip_reaction=_node_pair(state.f_int, frame.tip_node),
        max_abs_stress=float(state.stress.max(initial=0.0)) if max_abs_stress is None else max_abs_stress,
        min_tangent_eigenvalue=state.eigenvalue if min_eigenvalue is None else min_eigenvalue,
        yield_strength=float(arrays.yield_strength.min()),
        residual=state.residual,
        load_factor=state.load_factor,
        threshold_load_factor=threshold,
        history=history or [],
        diagnostics=diagnostics,
    )


def solve_linear(
    frame: PlanarFrame,
    load: LoadCase,
    settings: Optional[SolverSettings] = None,
    with_eigenvalue: bool = False,
) -> SolveResult:
    """
    Small-displacement frame solution.

    Args:
        frame: Frame to solve
        load: Prescribed motions and applied forces
        settings: Solver settings
        with_eigenvalue: Also report the smallest constrained stiffness eigenvalue

    Returns:
        SolveResult with status converged

    Raises:
        SingularSystemError: if the constrained stiffness is singular
    """
    settings = settings or SolverSettings()
    system = _constrain(frame, load)
    arrays = element_arrays(frame)
    zero = np.zeros(system.n_dof)
    K, _ = _assemble(arrays, element_state(arrays, zero, linear=True), system.n_dof)
    K_red = system.reduce(K)
    f_red = system.transform.T @ system.f_ext

    q = np.zeros(system.n_dof)
    q[system.fixed] = system.fixed_targets
    K_ff = K_red[system.free][:, system.free]
    K_fc = K_red[system.free][:, system.fixed]
    q[system.free] = _factor_solve(K_ff, f_red[system.free] - K_fc @ system.fixed_targets)

    d = system.to_global(q)
    elem_state, stress = _evaluate(arrays, d, linear=True)
    f_int = K @ d
    residual = float(np.linalg.norm((system.transform.T @ (f_int - system.f_ext))[system.free]))
    eigenvalue = None
    if with_eigenvalue:
        eigenvalue = smallest_eigenvalue(K_ff, settings.dense_eigen_limit)
    state = _State(d=d, f_int=f_int, stress=stress, load_factor=1.0,
                   eigenvalue=eigenvalue, residual=residual, iterations=1)
    logger.debug(f"Linear solve of {frame.label or 'frame'}: residual {residual:.3e}")
    return _build_result(frame, system, arrays, state, SolveStatus.CONVERGED, linear=True,
                         history=[_record(frame, 1, state)])


def _interpolate(x0: float, y0: float, x1: float, y1: float, y_target: float) -> float:
    if y1 == y0:
        return x1
    return x0 + (y_target - y0) * (x1 - x0) / (y1 - y0)


def solve_nonlinear(
    frame: PlanarFrame,
    load: LoadCase,
    settings: Optional[SolverSettings] = None,
) -> SolveResult:
    """
    Corotational incremental-iterative solution over ``load.steps`` increments.

    After every converged increment the outer-fiber stresses and the smallest
    eigenvalue of the constrained tangent are checked. On first yield
    (status yielded) or loss of positive definiteness (status buckled) the
    solve stops: displacement, reaction and load-factor fields describe the
    last stable state, ``max_abs_stress`` and ``min_tangent_eigenvalue`` are
    the values that crossed the threshold, and ``threshold_load_factor`` is
    the interpolated crossing. Non-convergence within ``max_iterations``
    gives status diverged with the failing step in ``diagnostics``.
    """
    settings = settings or SolverSettings()
    system = _constrain(frame, load)
    arrays = element_arrays(frame)
    n_dof = system.n_dof
    free, fixed = system.free, system.fixed
    T = system.transform
    f_red = T.T @ system.f_ext

    q = np.zeros(n_dof)
    d = np.zeros(n_dof)
    elem_state, stress = _evaluate(arrays, d, linear=False)
    K, f_int = _assemble(arrays, elem_state, n_dof)
    K_red = system.reduce(K)
    previous = _State(
        d=d.copy(), f_int=f_int, stress=stress, load_factor=0.0,
        eigenvalue=smallest_eigenvalue(K_red[free][:, free], settings.dense_eigen_limit),
    )
    prev_ratio = 0.0
    history = [_record(frame, 0, previous)]

    for step in range(1, load.steps + 1):
        lam = step / load.steps
        target = lam * system.fixed_targets
        delta_c = target - q[fixed]

        # tangent predictor
        K_ff = K_red[free][:, free]
        r_red = T.T @ f_int - lam * f_red
        try:
            q[free] += _factor_solve(K_ff, -r_red[free] - K_red[free][:, fixed] @ delta_c)
        except SingularSystemError as exc:
            return _build_result(frame, system, arrays, previous, SolveStatus.DIVERGED, False,
                                 history, diagnostics=f"step {step}: predictor failed: {exc}")
        q[fixed] = target

        converged = False
        residual = float("inf")
        iterations = 0
        for iterations in range(1, settings.max_iterations + 1):
            d = T @ q
            elem_state, stress = _evaluate(arrays, d, linear=False)
            K, f_int = _assemble(arrays, elem_state, n_dof)
            K_red = system.reduce(K)
            r_red = T.T @ f_int - lam * f_red
            residual = float(np.linalg.norm(r_red[free]))
            reference = max(float(np.linalg.norm(lam * system.f_ext)), float(np.linalg.norm(f_int)))
            logger.debug(f"step {step} iteration {iterations}: residual {residual:.3e}")
            if residual <= max(settings.tolerance * reference, ABSOLUTE_RESIDUAL_FLOOR):
                converged = True
                break
            try:
                q[free] += _factor_solve(K_red[free][:, free], -r_red[free])
            except SingularSystemError as exc:
                return _build_result(frame, system, arrays, previous, SolveStatus.DIVERGED, False,
                                     history, diagnostics=f"step {step}: {exc}")

        if not converged:
            message = (
                f"step {step}: residual {residual:.3e} not below tolerance after "
                f"{settings.max_iterations} iterations"
            )
            logger.warning(f"Nonlinear solve of {frame.label or 'frame'} diverged at {message}")
            return _build_result(frame, system, arrays, previous, SolveStatus.DIVERGED, False,
                                 history, diagnostics=message)

        eigenvalue = smallest_eigenvalue(K_red[free][:, free], settings.dense_eigen_limit)
        current = _State(d=d.copy(), f_int=f_int, stress=stress, load_factor=lam,
                         eigenvalue=eigenvalue, residual=residual, iterations=iterations)
        history.append(_record(frame, step, current))
        ratio = _yield_ratio(arrays, stress)

        crossings = []
        if ratio >= 1.0:
            crossings.append(
                (_interpolate(previous.load_factor, prev_ratio, lam, ratio, 1.0), SolveStatus.YIELDED)
            )
        if eigenvalue <= 0.0:
            crossings.append(
                (_interpolate(previous.load_factor, previous.eigenvalue, lam, eigenvalue, 0.0),
                 SolveStatus.BUCKLED)
            )
        if crossings:
            threshold, status = min(crossings, key=lambda item: item[0])
            logger.info(
                f"{frame.label or 'frame'} {status.value} at load factor {threshold:.4f} "
                f"(step {step}/{load.steps})"
            )
            return _build_result(
                frame, system, arrays, previous, status, False, history,
                max_abs_stress=float(stress.max(initial=0.0)),
                min_eigenvalue=eigenvalue,
                threshold=threshold,
                diagnostics=f"threshold crossed in step {step}",
            )
        previous, prev_ratio = current, ratio

    return _build_result(frame, system, arrays, previous, SolveStatus.CONVERGED, False, history)
