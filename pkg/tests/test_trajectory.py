"""Synchronised constant-rate step schedules."""

import math

import numpy as np
import pytest

from posture_bench.errors import ConfigurationError
from posture_bench.kinematics import (
    AXES,
    BASE,
    LATERAL,
    PITCH,
    base_sync,
    default_mechanism_config,
    ik,
    joint_state,
)
from posture_bench.trajectory import make_trajectory


def _home(mech):
    return joint_state(mech, {axis: 0.0 for axis in AXES})


def test_zero_move_yields_empty_trajectory(mech):
    home = _home(mech)
    traj = make_trajectory(home, home, mech)
    assert traj.n_samples == 0
    assert traj.duration_s == 0.0
    assert all(len(cmds) == 0 for cmds in traj.commands.values())
    assert traj.state_at(0.0, mech) == home


def test_duration_set_by_longest_axis(mech):
    # 30 mm of pitch travel at 10 mm/s dominates every other axis
    start = _home(mech)
    target = joint_state(mech, {PITCH: 30.0, LATERAL: 0.0, "thoracic": 0.0, BASE: 0.0})
    traj = make_trajectory(start, target, mech)
    assert traj.duration_s == pytest.approx(3.0, abs=1e-9)
    assert traj.n_samples == 300


def test_all_axes_finish_on_the_last_sample(mech):
    start = _home(mech)
    target = ik(30.0, 60.0, (20.0, 10.0), mech)
    traj = make_trajectory(start, target, mech)
    final = traj.travels_at(traj.duration_s, mech)
    for axis in AXES:
        # cumulative rounding pins the end within half a step of the target
        ax = mech.axes[axis]
        assert final[axis] == pytest.approx(
            target.travels()[axis], abs=ax.screw_lead_mm / (2 * ax.steps_per_rev) + 1e-12
        )
    assert traj.cumulative_steps[PITCH][0] == 0
    assert len(traj.cumulative_steps[PITCH]) == traj.n_samples + 1


def test_rates_respect_the_step_rate_ceiling(mech):
    start = _home(mech)
    target = ik(65.0, 85.0, (35.0, 30.0), mech)
    traj = make_trajectory(start, target, mech)
    for axis in AXES:
        for cmd in traj.commands[axis]:
            assert cmd.rate_steps_s <= mech.axes[axis].max_step_rate


def test_position_never_drifts_from_the_ideal_line(mech):
    start = _home(mech)
    target = ik(40.0, 70.0, (25.0, 15.0), mech)
    traj = make_trajectory(start, target, mech)
    deltas = {a: target.travels()[a] - start.travels()[a] for a in AXES}
    for axis in (PITCH, LATERAL, "thoracic"):
        ax = mech.axes[axis]
        half_step = ax.screw_lead_mm / (2 * ax.steps_per_rev)
        for k in range(traj.n_samples + 1):
            ideal = deltas[axis] * k / traj.n_samples
            actual = traj.cumulative_steps[axis][k] * ax.screw_lead_mm / ax.steps_per_rev
            assert abs(actual - ideal) <= half_step + 1e-12


def test_base_tracks_lateral_everywhere(mech):
    rng = np.random.default_rng(13)
    for _ in range(100):
        r1, p1 = rng.uniform(0, 65), rng.uniform(0, 85)
        r2, p2 = rng.uniform(0, 65), rng.uniform(0, 85)
        lat1 = min(r1, 35.0) * rng.uniform(0.3, 1.0) if r1 < 35 else rng.uniform(r1 - 30, 35.0)
        lat2 = min(r2, 35.0) * rng.uniform(0.3, 1.0) if r2 < 35 else rng.uniform(r2 - 30, 35.0)
        start = ik(r1, p1, (lat1, r1 - lat1), mech)
        target = ik(r2, p2, (lat2, r2 - lat2), mech)
        traj = make_trajectory(start, target, mech)
        for k in range(traj.n_samples + 1):
            state = traj.state_at(k * traj.sample_period_s, mech)
            assert abs(state.theta_base_deg - base_sync(state.theta_lateral_deg)) <= 0.5


def test_sample_index_clamps(mech):
    start = _home(mech)
    target = joint_state(mech, {PITCH: 10.0, LATERAL: 0.0, "thoracic": 0.0, BASE: 0.0})
    traj = make_trajectory(start, target, mech)
    assert traj.sample_index(-1.0) == 0
    assert traj.sample_index(0.0) == 0
    assert traj.sample_index(1e9) == traj.n_samples
    mid = traj.sample_index(traj.duration_s / 2)
    assert 0 < mid < traj.n_samples


def test_intermediate_states_stay_within_joint_limits(mech):
    start = ik(0.0, 0.0, (0.0, 0.0), mech)
    target = ik(65.0, 85.0, (35.0, 30.0), mech)
    traj = make_trajectory(start, target, mech)
    for frac in np.linspace(0.0, 1.0, 50):
        state = traj.state_at(frac * traj.duration_s, mech)    # joint_state re-validates
        # quantised travels may sit a few millidegrees past the edge
        assert 0.0 <= state.roll_deg <= 65.0 + 5e-3


def test_bad_sample_period_is_rejected(mech):
    home = _home(mech)
    with pytest.raises(ConfigurationError, match="period"):
        make_trajectory(home, home, mech, sample_period_s=0.0)


def test_infeasible_rate_is_reported():
    import dataclasses

    mech = default_mechanism_config()
    slow_axes = dict(mech.axes)
    # leave v_max alone but choke the step budget so the schedule cannot fit
    slow_axes[PITCH] = dataclasses.replace(mech.axes[PITCH], max_step_rate=100.0)
    choked = dataclasses.replace(mech, axes=slow_axes)
    start = joint_state(choked, {a: 0.0 for a in AXES})
    target = joint_state(choked, {PITCH: 300.0, LATERAL: 0.0, "thoracic": 0.0, BASE: 0.0})
    traj = make_trajectory(start, target, choked)
    # duration stretches so the 100 steps/s cap still holds
    for cmd in traj.commands[PITCH]:
        assert cmd.rate_steps_s <= 100.0
    assert traj.duration_s >= 300.0 * 125 / 100.0 - 1e-6
