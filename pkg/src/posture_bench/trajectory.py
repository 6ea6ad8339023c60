"""Synchronised step schedules between two joint states.

All four screws run constant-rate profiles that start and finish on the same
sample: the slowest permissible move sets the common duration and every other
axis just runs proportionally slower. Positions are quantised to whole motor
steps by cumulative rounding, so no axis ever drifts more than half a step
from its ideal line and all of them land exactly on the final step count.

The base axis is special: its schedule is regenerated sample by sample from
the quantised lateral profile through the slaving law, rather than scaled
from its own endpoints, so the base angle tracks the waist angle to within a
single step everywhere along the move.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

from .errors import ConfigurationError
from .kinematics import (
    AXES,
    BASE,
    LATERAL,
    JointState,
    MechanismConfig,
    StepCommand,
    base_sync,
    fk_lateral,
    inverse_axis,
    joint_state,
    steps_to_travel,
    travel_to_steps,
)

DEFAULT_SAMPLE_PERIOD_S = 0.01


@dataclass(frozen=True)
class Trajectory:
    """Immutable step schedule; positions are exact at every sample."""

    start: JointState
    target: JointState
    sample_period_s: float
    n_samples: int
    commands: Mapping[str, tuple[StepCommand, ...]]
    cumulative_steps: Mapping[str, tuple[int, ...]]   # length n_samples + 1, [0] == 0

    @property
    def duration_s(self) -> float:
        return self.n_samples * self.sample_period_s

    def sample_index(self, elapsed_s: float) -> int:
        if elapsed_s <= 0:
            return 0
        return min(self.n_samples, int(math.floor(elapsed_s / self.sample_period_s)))

    def travels_at(self, elapsed_s: float, config: MechanismConfig) -> dict[str, float]:
        k = self.sample_index(elapsed_s)
        start = self.start.travels()
        return {
            axis: start[axis] + steps_to_travel(self.cumulative_steps[axis][k], axis, config)
            for axis in AXES
        }

    def state_at(self, elapsed_s: float, config: MechanismConfig) -> JointState:
        return joint_state(
            config, self.travels_at(elapsed_s, config), self.start.passive_height_mm
        )


def make_trajectory(
    start: JointState,
    target: JointState,
    config: MechanismConfig,
    sample_period_s: float = DEFAULT_SAMPLE_PERIOD_S,
) -> Trajectory:
    """Build the synchronised schedule from ``start`` to ``target``.

    A zero-displacement request yields an empty trajectory of duration 0.
    """
    if sample_period_s <= 0:
        raise ConfigurationError(f"sample period must be positive, got {sample_period_s}")
    start_travels = start.travels()
    deltas = {axis: target.travels()[axis] - start_travels[axis] for axis in AXES}
    duration = 0.0
    for axis in AXES:
        ax = config.axes[axis]
        # what actually moves is the whole-step displacement; a sub-step
        # delta on every axis is a null move, not an infinitesimal one
        total_steps = abs(travel_to_steps(deltas[axis], axis, config))
        moved_mm = total_steps * ax.screw_lead_mm / ax.steps_per_rev
        duration = max(duration, moved_mm / ax.v_max_mm_s, total_steps / ax.max_step_rate)
    if duration == 0.0:
        empty = {axis: () for axis in AXES}
        zeros = {axis: (0,) for axis in AXES}
        return Trajectory(start, target, sample_period_s, 0, empty, zeros)

    n = max(1, math.ceil(duration / sample_period_s - 1e-12))
    cumulative: dict[str, tuple[int, ...]] = {}
    for axis in AXES:
        if axis == BASE:
            continue
        cumulative[axis] = tuple(
            travel_to_steps(deltas[axis] * k / n, axis, config) for k in range(n + 1)
        )
    # base follows the quantised lateral angle, not its own straight line
    base_steps = []
    for k in range(n + 1):
        lat_travel = start_travels[LATERAL] + steps_to_travel(
            cumulative[LATERAL][k], LATERAL, config
        )
        base_travel = inverse_axis(BASE, base_sync(fk_lateral(lat_travel, config)), config)
        base_steps.append(travel_to_steps(base_travel - start_travels[BASE], BASE, config))
    cumulative[BASE] = tuple(base_steps)

    commands: dict[str, tuple[StepCommand, ...]] = {}
    for axis in AXES:
        ax = config.axes[axis]
        cmds = []
        for k in range(1, n + 1):
            steps = cumulative[axis][k] - cumulative[axis][k - 1]
            rate = abs(steps) / sample_period_s
            if rate > ax.max_step_rate:
                raise ConfigurationError(
                    f"axis {axis!r}: schedule needs {rate:.0f} steps/s, "
                    f"limit is {ax.max_step_rate:.0f}"
                )
            cmds.append(StepCommand(axis=axis, steps=steps, rate_steps_s=rate))
        commands[axis] = tuple(cmds)
    return Trajectory(start, target, sample_period_s, n, commands, cumulative)
