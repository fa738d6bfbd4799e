"""
Quasi-static open-loop insertion with mechanical search.

The plug is a rigid rectangle held at its top centre by the fingers,
modelled as a lumped spring between the commanded gripper pose and the
plug pose q = (u, z, psi). ``u`` is the simulated lateral axis, ``z`` the
assembly direction (up positive, socket top at z = 0). Every increment of
the commanded trajectory solves grip wrench + contact wrench = 0 for q.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterator, List, Optional, Sequence, Tuple

import numpy as np
from scipy.optimize import root

from ..data.models import (
    Axis,
    InsertionScenario,
    Outcome,
    SearchPhase,
    SearchTrace,
    StrategyParams,
    TraceSample,
    ViscoelasticFit,
)
from ..errors import ContactResolutionError, DomainError
from .contact import Box, ContactLaw, ContactModel, jamming_check, rotation

logger = logging.getLogger(__name__)

EQUILIBRIUM_TOLERANCE = 1e-4
HOUSING_DEPTH = 10.0
PIN_TOLERANCE = 0.05
MAX_BISECTIONS = 4
STALL_PROGRESS = 1e-3


def viscous_force_estimate(fit: ViscoelasticFit, speed: float) -> float:
    """
    Rate-dependent contact force b * speed added at a given approach speed.

    Raises:
        DomainError: if speed is negative
    """
    if speed < 0.0:
        raise DomainError(f"speed must be non-negative, got {speed}")
    return fit.b * speed


# ============ Grip ============

@dataclass(frozen=True)
class GripSpring:
    """Lumped finger compliance in the simulated plane."""

    lateral: float
    vertical: float
    rotational: float
    free_rotation: float = 0.0
    free_rotation_stiffness: float = 0.0
    rotation_locked: bool = False

    def wrench(self, pose: np.ndarray, command: Sequence[float]) -> np.ndarray:
        du, dz, dpsi = pose - np.asarray(command)
        moment = -self.rotational * dpsi
        if self.free_rotation > 0.0:
            excess = abs(dpsi) - self.free_rotation
            if excess <= 0.0:
                moment = -self.free_rotation_stiffness * dpsi
            else:
                moment = -math.copysign(
                    self.free_rotation_stiffness * self.free_rotation + self.rotational * excess,
                    dpsi,
                )
        return np.array([-self.lateral * du, -self.vertical * dz, moment])


def grip_spring(scenario: InsertionScenario, axis: Axis) -> GripSpring:
    """
    Grip spring for one plane.

    In the y plane the fingers act in parallel on both plug sides: lateral
    n*kyy, vertical n*kzz. The notched tips hold the plug by form closure
    and the parallel walls translate the tip without turning it, so the
    plug keeps the commanded orientation. The kzy couplings of a mirrored
    finger pair cancel. In the x plane the plug may swivel freely inside
    the grip up to the free rotation limit before the fingers' vertical
    stiffness, acting at half the plug width, stops it.
    """
    k = scenario.grip_compliance
    n = scenario.finger_count
    half = scenario.plug.width / 2.0
    rotational = n * k.kzz * half ** 2
    if axis == Axis.Y:
        return GripSpring(
            lateral=n * k.kyy, vertical=n * k.kzz, rotational=rotational, rotation_locked=True
        )
    return GripSpring(
        lateral=n * k.kxx,
        vertical=n * k.kzz,
        rotational=rotational,
        free_rotation=math.radians(scenario.free_rotation_limit),
        free_rotation_stiffness=scenario.rotation_stiffness,
    )


# ============ Scene ============

def build_contact_model(scenario: InsertionScenario, axis: Axis) -> ContactModel:
    """Plug box, socket housing boxes and the penalty law for one plane."""
    w, h = scenario.plug.width, scenario.plug.height
    depth, margin = scenario.socket.depth, scenario.socket.housing_margin
    o = scenario.offset(axis)
    a = scenario.opening_width / 2.0
    bottom = -depth - HOUSING_DEPTH

    plug = Box("plug", (-w / 2.0, -h), (w / 2.0, 0.0))
    socket = [
        Box("left", (o - a - margin, bottom), (o - a, 0.0)),
        Box("right", (o + a, bottom), (o + a + margin, 0.0)),
        # floor runs under the walls so a corner pressed into a wall still lands on it
        Box("floor", (o - a - margin, bottom), (o + a + margin, -depth)),
    ]
    socket_corners = {
        "left_outer": (o - a - margin, 0.0),
        "left_inner": (o - a, 0.0),
        "right_inner": (o + a, 0.0),
        "right_outer": (o + a + margin, 0.0),
    }
    plug_corners = {"bottom_left": (-w / 2.0, -h), "bottom_right": (w / 2.0, -h)}
    law = ContactLaw(
        normal_stiffness=scenario.contact_stiffness,
        tangential_stiffness=scenario.contact_stiffness,
        friction_mu=scenario.friction_mu,
    )
    return ContactModel(plug, plug_corners, socket, socket_corners, law)


# ============ Trajectory ============

Command = Tuple[float, float, float]


def _segment(start: Command, end: Command, increment: float) -> List[Command]:
    distance = math.hypot(end[0] - start[0], end[1] - start[1])
    count = max(1, math.ceil(distance / increment - 1e-9))
    return [
        tuple(s + (e - s) * i / count for s, e in zip(start, end))
        for i in range(1, count + 1)
    ]


def search_trajectory(
    scenario: InsertionScenario, strategy: StrategyParams, axis: Axis
) -> Iterator[Tuple[SearchPhase, List[Command]]]:
    """
    Commanded grip-point poses per phase.

    Approach lowers the lowest plug corner from ``approach_height`` above
    the socket top to ``preload_depth`` below it, offset by -search_start
    along the searched axis. The slide along that axis runs to
    +search_end; the other slide phase holds still for one sample. The
    insert phase first turns a tilted plug upright in place, then pushes
    on to socket depth plus overtravel.
    """
    w, h = scenario.plug.width, scenario.plug.height
    psi = -math.radians(scenario.tilt) if axis == Axis.X else 0.0
    drop = h * math.cos(psi) + (w / 2.0) * abs(math.sin(psi))

    start = (-strategy.search_start, strategy.approach_height + drop, psi)
    landed = (-strategy.search_start, -strategy.preload_depth + drop, psi)
    slid = (strategy.search_end, landed[1], psi)
    upright = (strategy.search_end, landed[1], 0.0)
    seated = (strategy.search_end, h - scenario.socket.depth - strategy.overtravel, 0.0)

    yield SearchPhase.APPROACH, [start] + _segment(start, landed, strategy.increment)
    sliding = _segment(landed, slid, strategy.increment)
    if axis == Axis.X:
        yield SearchPhase.SLIDE_X, sliding
        yield SearchPhase.SLIDE_Y, [slid]
    else:
        yield SearchPhase.SLIDE_X, [landed]
        yield SearchPhase.SLIDE_Y, sliding
    # the far plug edge sweeps h*|psi| while turning
    turns = math.ceil(abs(psi) * h / strategy.increment - 1e-9)
    levelling = [(slid[0], slid[1], psi * (1.0 - i / turns)) for i in range(1, turns + 1)]
    yield SearchPhase.INSERT_Z, levelling + _segment(upright, seated, strategy.increment)


# ============ Simulation ============

class InsertionSimulator:
    """Steps one scenario along the search trajectory."""

    def __init__(self, scenario: InsertionScenario, strategy: StrategyParams, axis: Axis):
        self.scenario = scenario
        self.strategy = strategy
        self.axis = axis
        self.grip = grip_spring(scenario, axis)
        self.contacts = build_contact_model(scenario, axis)
        self.free = [0, 1] if self.grip.rotation_locked else [0, 1, 2]
        self.scale = np.array([1.0, 1.0, 1.0 / scenario.plug.height])[self.free]
        self.pose = np.zeros(3)
        self.command: Command = (0.0, 0.0, 0.0)

    def _pose(self, x: np.ndarray, command: Command) -> np.ndarray:
        if self.grip.rotation_locked:
            return np.array([x[0], x[1], command[2]])
        return np.asarray(x, dtype=float)

    def _residual(self, x: np.ndarray, command: Command) -> np.ndarray:
        """Unbalanced wrench on the free coordinates."""
        q = self._pose(x, command)
        active = self.contacts.resolve(q, self.pose)
        return (self.grip.wrench(q, command) + self.contacts.wrench(q, active))[self.free]

    def _norm(self, x: np.ndarray, command: Command) -> float:
        value = np.abs(self._residual(x, command) * self.scale)
        return float(np.max(value)) if np.all(np.isfinite(value)) else math.inf

    def _solve(self, command: Command) -> Optional[np.ndarray]:
        guess = (self.pose + (np.asarray(command) - np.asarray(self.command)))[self.free]
        if self._norm(guess, command) <= EQUILIBRIUM_TOLERANCE:
            return self._pose(guess, command)
        for method, options in (("hybr", {"xtol": 1e-13}), ("lm", {"xtol": 1e-15, "ftol": 1e-15})):
            solution = root(self._residual, guess, args=(command,), method=method, options=options)
            if self._norm(solution.x, command) <= EQUILIBRIUM_TOLERANCE:
                return self._pose(solution.x, command)
            logger.debug(f"{method} left residual {self._norm(solution.x, command):.3e} N")
        return None

    def _advance(self, command: Command, step: int, level: int = 0) -> None:
        pose = self._solve(command)
        if pose is None:
            if level >= MAX_BISECTIONS:
                raise ContactResolutionError(
                    f"no contact equilibrium at step {step} for command {command}", step=step
                )
            middle = tuple((a + b) / 2.0 for a, b in zip(self.command, command))
            self._advance(middle, step, level + 1)
            self._advance(command, step, level + 1)
            return
        self.contacts.commit(self.contacts.resolve(pose, self.pose))
        self.pose = pose
        self.command = command

    def _sample(self, step: int, phase: SearchPhase) -> TraceSample:
        active = self.contacts.resolve(self.pose, self.pose)
        contact = self.contacts.wrench(self.pose, active)
        grip = self.grip.wrench(self.pose, self.command)
        return TraceSample(
            step=step,
            phase=phase,
            command=tuple(float(v) for v in self.command),
            pose=tuple(float(v) for v in self.pose),
            force=self._spatial(contact),
            grip_force=self._spatial(grip),
            contacts=[c.as_record(self.scenario.friction_mu) for c in active],
            residual=float(np.max(np.abs((grip + contact)[self.free] * self.scale))),
        )

    def _spatial(self, wrench: np.ndarray) -> Tuple[float, float, float]:
        u, z = float(wrench[0]), float(wrench[1])
        return (u, 0.0, z) if self.axis == Axis.X else (0.0, u, z)

    def bottom_centre(self) -> np.ndarray:
        return self.pose[:2] + rotation(self.pose[2]) @ np.array([0.0, -self.scenario.plug.height])

    def in_opening(self) -> bool:
        """Plug bottom below the socket top with both bottom corners over the opening."""
        if self.bottom_centre()[1] >= 0.0:
            return False
        o = self.scenario.offset(self.axis)
        a = self.scenario.opening_width / 2.0
        # corners pressed into a wall sit inside it by the penalty depth
        allowance = self.strategy.force_limit / self.scenario.contact_stiffness
        w, h = self.scenario.plug.width, self.scenario.plug.height
        for corner in ((-w / 2.0, -h), (w / 2.0, -h)):
            u, _ = ContactModel.world_point(self.pose, np.array(corner))
            if abs(u - o) > a + allowance:
                return False
        return True

    def pin_collision(self, sample: TraceSample) -> bool:
        """A misaligned plug corner reaching protruding pins inside the opening."""
        pin_height = self.scenario.connector_traits.pin_height
        if pin_height <= 0.0 or not sample.contacts:
            return False
        o = self.scenario.offset(self.axis)
        a = self.scenario.opening_width / 2.0
        misaligned = abs(self.bottom_centre()[0] - o) > self.scenario.clearance / 2.0 + PIN_TOLERANCE
        if not misaligned:
            return False
        w, h = self.scenario.plug.width, self.scenario.plug.height
        for corner in ((-w / 2.0, -h), (w / 2.0, -h)):
            u, z = ContactModel.world_point(self.pose, np.array(corner))
            if abs(u - o) < a and z < pin_height:
                return True
        return False

    def run(self) -> SearchTrace:
        scenario, strategy = self.scenario, self.strategy
        offset = scenario.offset(self.axis)
        phases, samples = [], []
        outcome: Optional[Outcome] = None
        reason = ""
        entered = False
        step = 0
        insert_heights: List[float] = []

        logger.info(f"Simulating insertion along {self.axis.value} at offset {offset:+.3f} mm")
        for phase, commands in search_trajectory(scenario, strategy, self.axis):
            phases.append(phase)
            if not samples:
                self.command = commands[0]
                self.pose = np.asarray(commands[0], dtype=float)
            for command in commands:
                self._advance(command, step)
                sample = self._sample(step, phase)
                samples.append(sample)
                step += 1
                entered = entered or self.in_opening()

                peak = sample.max_contact_force
                if peak > strategy.force_limit:
                    outcome, reason = Outcome.OVERFORCE, (
                        f"contact force {peak:.2f} N above {strategy.force_limit:g} N in {phase.value}"
                    )
                elif self.pin_collision(sample):
                    outcome, reason = Outcome.OVERFORCE, f"pin collision in {phase.value}"
                elif phase == SearchPhase.INSERT_Z:
                    insert_heights.append(float(self.bottom_centre()[1]))
                    if len(insert_heights) > strategy.stall_steps:
                        progress = insert_heights[-strategy.stall_steps - 1] - insert_heights[-1]
                        if progress < STALL_PROGRESS and jamming_check(
                            sample.contacts, scenario.friction_mu
                        ):
                            outcome, reason = Outcome.JAMMED, (
                                f"wedged without progress for {strategy.stall_steps} steps"
                            )
                if outcome is not None:
                    break
            if outcome is not None:
                break

        depth = max(0.0, -float(self.bottom_centre()[1])) if self.in_opening() else 0.0
        required = scenario.socket.depth - strategy.seat_tolerance
        if outcome is None:
            if entered and depth >= required:
                outcome, reason = Outcome.SUCCESS, "seated"
            elif entered:
                outcome, reason = Outcome.JAMMED, f"stopped at {depth:.3f} mm of {required:.3f} mm"
            else:
                outcome, reason = Outcome.MISSED, "plug never entered the opening"

        viscous, flagged = 0.0, False
        if scenario.viscoelastic is not None:
            viscous = viscous_force_estimate(scenario.viscoelastic, strategy.speed)
            flagged = viscous > strategy.force_limit
            if flagged:
                logger.warning(
                    f"Viscous contact force {viscous:.1f} N at {strategy.speed:g} mm/s "
                    f"exceeds {strategy.force_limit:g} N"
                )

        logger.info(
            f"Insertion along {self.axis.value} at {offset:+.3f} mm: {outcome.value} "
            f"({reason}), depth {depth:.3f} mm, {len(samples)} samples"
        )
        return SearchTrace(
            axis=self.axis,
            offset=offset,
            phases=phases,
            samples=samples,
            outcome=outcome,
            insert_depth=depth,
            required_depth=required,
            entered_opening=entered,
            reason=reason,
            viscous_force=viscous,
            viscous_overforce=flagged,
        )


def simulate_insert(
    scenario: InsertionScenario,
    strategy: Optional[StrategyParams] = None,
    axis: Axis = Axis.Y,
) -> SearchTrace:
    """
    Simulate one open-loop search insertion.

    Args:
        scenario: Plug, socket, compliance and misalignment
        strategy: Search trajectory parameters
        axis: Plane of the simulation; the searched lateral axis

    Returns:
        SearchTrace with one sample per increment

    Raises:
        ContactResolutionError: if an increment has no equilibrium even after bisection
    """
    return InsertionSimulator(scenario, strategy or StrategyParams(), Axis(axis)).run()

