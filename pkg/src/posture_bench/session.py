"""Simulated control session: mode machine, ticks, telemetry, replay.

One Session owns the authoritative state. Commands mutate it between ticks;
``tick`` advances the simulated clock by one period and returns a telemetry
frame. There is no wall clock and no randomness anywhere in here, so a log
of (tick index, command) pairs replays to bit-identical state.

Modes: idle (never moved), moving (trajectory running), holding (posture
held by the self-locking screws), estop (frozen until released). The screws
hold position whenever the motors are stopped, so holding and estop ticks
change nothing but the clock.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Iterable, Mapping, Union

from .config import BenchConfig, bench_config_from_dict, bench_config_to_dict
from .errors import CommandRejected, InputError
from .kinematics import AXES, JointState, joint_state, roll_total
from .load_model import SplitWeights, predict_load, split_optimize
from .posture import PostureAngles, posture_to_gravity
from .trajectory import Trajectory, make_trajectory

IDLE = "idle"
MOVING = "moving"
HOLDING = "holding"
ESTOP = "estop"
MODES = (IDLE, MOVING, HOLDING, ESTOP)


@dataclass(frozen=True)
class SetTarget:
    roll_deg: float
    pitch_deg: float
    split: tuple[float, float] | None = None   # None means pick the best split


@dataclass(frozen=True)
class EStop:
    pass


@dataclass(frozen=True)
class Release:
    pass


@dataclass(frozen=True)
class SetWeights:
    w_leg: float
    w_abd: float


@dataclass(frozen=True)
class SetSubject:
    subject: str | None


Command = Union[SetTarget, EStop, Release, SetWeights, SetSubject]


def _command_to_dict(cmd: Command) -> dict:
    if isinstance(cmd, SetTarget):
        split = "auto" if cmd.split is None else {
            "lat_deg": cmd.split[0], "thor_deg": cmd.split[1],
        }
        return {"cmd": "set_target", "roll_deg": cmd.roll_deg,
                "pitch_deg": cmd.pitch_deg, "split": split}
    if isinstance(cmd, EStop):
        return {"cmd": "estop"}
    if isinstance(cmd, Release):
        return {"cmd": "release"}
    if isinstance(cmd, SetWeights):
        return {"cmd": "set_weights", "w_leg": cmd.w_leg, "w_abd": cmd.w_abd}
    if isinstance(cmd, SetSubject):
        return {"cmd": "set_subject", "subject": cmd.subject}
    raise InputError(f"unknown command {cmd!r}")


def command_from_dict(raw: Mapping) -> Command:
    kind = raw.get("cmd")
    if kind == "set_target":
        split = raw.get("split", "auto")
        if split == "auto" or split is None:
            parsed = None
        elif isinstance(split, Mapping) and "lat_deg" in split and "thor_deg" in split:
            parsed = (float(split["lat_deg"]), float(split["thor_deg"]))
        else:
            raise InputError(f"split must be \"auto\" or {{lat_deg, thor_deg}}, got {split!r}")
        return SetTarget(float(raw["roll_deg"]), float(raw["pitch_deg"]), parsed)
    if kind == "estop":
        return EStop()
    if kind == "release":
        return Release()
    if kind == "set_weights":
        return SetWeights(float(raw["w_leg"]), float(raw["w_abd"]))
    if kind == "set_subject":
        return SetSubject(raw.get("subject"))
    raise InputError(f"unknown command kind {kind!r}")


def home_state(config: BenchConfig) -> JointState:
    return joint_state(config.mechanism, {axis: 0.0 for axis in AXES})


class Session:
    """Deterministic simulated control session."""

    def __init__(
        self,
        config: BenchConfig | None = None,
        log: IO[str] | str | Path | None = None,
    ):
        self.config = config or BenchConfig()
        self.mode = IDLE
        self.joints = home_state(self.config)
        self.weights = self.config.weights
        self.subject: str | None = None
        self.tick_index = 0
        self.clock_s = 0.0
        self.tick_period_s = 1.0 / self.config.session.tick_hz
        self.trajectory: Trajectory | None = None
        self.traj_elapsed_s = 0.0
        self.target: JointState | None = None
        self._frame_cache: dict | None = None
        self._log_handle: IO[str] | None = None
        self._owns_log = False
        if log is not None:
            if isinstance(log, (str, Path)):
                self._log_handle = open(log, "w", encoding="utf-8", newline="\n")
                self._owns_log = True
            else:
                self._log_handle = log
            self._log({"type": "session",
                       "config": bench_config_to_dict(self.config)})

    # ------------------------------------------------------------------
    def close(self):
        if self._log_handle is not None and self._owns_log:
            self._log_handle.close()
            self._log_handle = None

    def _log(self, entry: dict):
        if self._log_handle is not None:
            self._log_handle.write(json.dumps(entry, sort_keys=True) + "\n")
            self._log_handle.flush()

    # ------------------------------------------------------------------
    def command(self, cmd: Command) -> dict:
        """Apply one command; raises if it is illegal right now."""
        result = self._apply(cmd)
        self._log({"type": "command", "tick": self.tick_index,
                   "data": _command_to_dict(cmd)})
        return result

    def _apply(self, cmd: Command) -> dict:
        if isinstance(cmd, EStop):
            self.mode = ESTOP
            self.trajectory = None
            self.target = None
            self._frame_cache = None
            return {"mode": self.mode}
        if isinstance(cmd, Release):
            if self.mode != ESTOP:
                raise CommandRejected(
                    f"release is only valid in estop; current mode is {self.mode}",
                    self.mode,
                )
            self.mode = HOLDING
            self._frame_cache = None
            return {"mode": self.mode}
        if isinstance(cmd, SetWeights):
            self.weights = SplitWeights(w_leg=cmd.w_leg, w_abd=cmd.w_abd)
            return {"weights": {"w_leg": cmd.w_leg, "w_abd": cmd.w_abd}}
        if isinstance(cmd, SetSubject):
            self.subject = cmd.subject
            return {"subject": cmd.subject}
        if isinstance(cmd, SetTarget):
            if self.mode not in (IDLE, HOLDING):
                raise CommandRejected(
                    f"set_target is only valid in idle or holding; "
                    f"current mode is {self.mode}",
                    self.mode,
                )
            if cmd.split is None:
                split = split_optimize(
                    cmd.roll_deg,
                    pendulum=self.config.session.pendulum,
                    params=self.config.load,
                    weights=self.weights,
                    config=self.config.mechanism,
                )
                split_pair = (split.lateral_deg, split.thoracic_deg)
            else:
                split_pair = cmd.split
            # validates ranges and the split sum, raises RangeError/InputError
            target = joint_state_from_posture(
                cmd.roll_deg, cmd.pitch_deg, split_pair, self.config,
                passive_height_mm=self.joints.passive_height_mm,
            )
            traj = make_trajectory(
                self.joints, target, self.config.mechanism, self.tick_period_s
            )
            self.target = target
            if traj.n_samples == 0:
                self.joints = target
                self.mode = HOLDING
                self.trajectory = None
            else:
                self.trajectory = traj
                self.traj_elapsed_s = 0.0
                self.mode = MOVING
            self._frame_cache = None
            return {
                "mode": self.mode,
                "split": {"lat_deg": split_pair[0], "thor_deg": split_pair[1]},
                "duration_s": traj.duration_s,
            }
        raise InputError(f"unknown command {cmd!r}")

    # ------------------------------------------------------------------
    def tick(self, dt_s: float | None = None) -> dict:
        """Advance the simulated clock one period and emit a frame."""
        dt = self.tick_period_s if dt_s is None else dt_s
        self.tick_index += 1
        self.clock_s += dt
        if self.mode == MOVING and self.trajectory is not None:
            self.traj_elapsed_s += dt
            traj = self.trajectory
            if self.traj_elapsed_s >= traj.duration_s - 1e-12:
                self.joints = traj.state_at(traj.duration_s, self.config.mechanism)
                self.mode = HOLDING
                self.trajectory = None
            else:
                self.joints = traj.state_at(self.traj_elapsed_s, self.config.mechanism)
            self._frame_cache = None
        frame = self.frame()
        self._log({"type": "frame", **frame})
        return frame

    def frame(self) -> dict:
        """Current frame without advancing the clock."""
        if self._frame_cache is None:
            j = self.joints
            posture = PostureAngles(roll_deg=j.roll_deg, pitch_deg=j.pitch_deg)
            gravity = posture_to_gravity(posture)
            load = predict_load(
                j.theta_lateral_deg,
                j.theta_thoracic_deg,
                self.config.session.pendulum,
                self.config.load,
                self.config.mechanism,
            )
            self._frame_cache = {
                "mode": self.mode,
                "joints": {
                    "travel_pitch_mm": j.travel_pitch_mm,
                    "travel_lateral_mm": j.travel_lateral_mm,
                    "travel_thoracic_mm": j.travel_thoracic_mm,
                    "travel_base_mm": j.travel_base_mm,
                    "passive_height_mm": j.passive_height_mm,
                    "theta_pitch_deg": j.theta_pitch_deg,
                    "theta_lateral_deg": j.theta_lateral_deg,
                    "theta_thoracic_deg": j.theta_thoracic_deg,
                    "theta_base_deg": j.theta_base_deg,
                },
                "posture": {"roll_deg": j.roll_deg, "pitch_deg": j.pitch_deg},
                "gravity": {"roll_deg": gravity.roll_deg, "pitch_deg": gravity.pitch_deg},
                "load": {"legs": load.legs, "abdomen": load.abdomen},
            }
        frame = dict(self._frame_cache)
        frame["t"] = self.clock_s
        frame["tick"] = self.tick_index
        frame["progress"] = self.progress
        return frame

    @property
    def progress(self) -> float:
        if self.mode == MOVING and self.trajectory is not None:
            if self.trajectory.duration_s == 0:
                return 1.0
            return min(1.0, self.traj_elapsed_s / self.trajectory.duration_s)
        return 1.0 if self.target is not None else 0.0

    def snapshot(self) -> dict:
        """Current state as a frame plus session extras."""
        frame = self.frame()
        frame["weights"] = {"w_leg": self.weights.w_leg, "w_abd": self.weights.w_abd}
        frame["subject"] = self.subject
        return frame

    def run_until_settled(self, max_s: float = 120.0) -> dict:
        """Tick until the move finishes; safety-valve on the simulated clock."""
        deadline = self.clock_s + max_s
        frame = self.frame()
        while self.mode == MOVING:
            if self.clock_s > deadline:
                raise InputError(f"move did not settle within {max_s:.0f} simulated seconds")
            frame = self.tick()
        return frame


def joint_state_from_posture(
    roll_deg: float,
    pitch_deg: float,
    split: tuple[float, float],
    config: BenchConfig,
    passive_height_mm: float = 0.0,
) -> JointState:
    from .kinematics import ik

    if abs(roll_total(split[0], split[1]) - roll_deg) > 1e-6:
        raise InputError(
            f"split {split[0]:.4f} + {split[1]:.4f} deg does not sum to "
            f"roll {roll_deg:.4f} deg"
        )
    return ik(roll_deg, pitch_deg, split, config.mechanism, passive_height_mm)


def replay(log: Iterable[str] | str | Path) -> Session:
    """Re-run a session log; returns the session in its final state.

    Only the recorded commands and tick indices drive the replay; frames in
    the log are ignored. Determinism of the session makes the result
    bit-identical to the original run.
    """
    if isinstance(log, (str, Path)):
        with open(log, encoding="utf-8") as fh:
            lines = fh.read().splitlines()
    else:
        lines = [ln for ln in log]
    entries = [json.loads(ln) for ln in lines if ln.strip()]
    if not entries or entries[0].get("type") != "session":
        raise InputError("log must start with a session header entry")
    config = bench_config_from_dict(entries[0]["config"])
    session = Session(config)
    max_tick = 0
    for entry in entries[1:]:
        if entry.get("type") == "command":
            max_tick = max(max_tick, int(entry["tick"]))
        elif entry.get("type") == "frame":
            max_tick = max(max_tick, int(entry["tick"]))
    commands = [e for e in entries[1:] if e.get("type") == "command"]
    ci = 0
    for tick in range(max_tick + 1):
        while ci < len(commands) and int(commands[ci]["tick"]) == tick:
            session.command(command_from_dict(commands[ci]["data"]))
            ci += 1
        if tick < max_tick:
            session.tick()
    return session
