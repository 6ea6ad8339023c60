"""Mechanism geometry for the posture bench.

Four screw-driven axes move the seat: trunk pitch (backrest recline), waist
lateral bending, thoracic rotation, and the pendulum base. Pitch and lateral
bending use a slider-crank linkage: a trapezoidal screw changes the distance
between two pivots and the law of cosines gives the plate angle. Thoracic
rotation and the base ride on circular guides, so travel maps to angle through
the arc radius. Every screw is self locking, which is what makes posture hold
with the motors stopped.

Units at the interface are degrees and millimetres; trig runs in radians
internally. Roll is realised as the sum of waist lateral bending and thoracic
rotation, and the pendulum base is slaved one-to-one to lateral bending so the
shared rotation centre stays put.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping, Union

from .errors import ConfigurationError, InputError, RangeError

PITCH = "pitch"
LATERAL = "lateral"
THORACIC = "thoracic"
BASE = "base"
AXES = (PITCH, LATERAL, THORACIC, BASE)

ANGLE_TOL_DEG = 1e-9      # slack when checking derived angles against limits
ROLL_SLACK_DEG = 5e-3     # roll-sum slack: whole-step travels can overshoot the
                          # envelope edge by a few millidegrees, and the strokes
                          # physically cover that much past the declared limits
SPLIT_TOL_DEG = 1e-6      # how exactly a roll split must sum to the target
_BISECT_ITERS = 80        # leaves the travel bracket below 1e-10 mm


@dataclass(frozen=True)
class CrankLink:
    """Slider-crank geometry for the pitch and lateral axes.

    Parameters
    ----------
    lever_mm, base_mm:
        The two fixed link lengths meeting at the plate pivot.
    home_gap_mm:
        Pivot-to-pivot distance at zero screw travel. Screw travel adds to
        this gap, opening the triangle; the plate angle is the opening minus
        its home value, so the axis reads 0 deg at home by construction.
    """

    lever_mm: float
    base_mm: float
    home_gap_mm: float

    def angle_deg(self, travel_mm: float) -> float:
        gap = self.home_gap_mm + travel_mm
        return math.degrees(self._opening(gap) - self._opening(self.home_gap_mm))

    def _opening(self, gap_mm: float) -> float:
        num = self.lever_mm ** 2 + self.base_mm ** 2 - gap_mm ** 2
        den = 2.0 * self.lever_mm * self.base_mm
        cos_phi = num / den
        if not -1.0 <= cos_phi <= 1.0:
            raise ConfigurationError(
                f"crank gap {gap_mm:.3f} mm violates the triangle inequality "
                f"for links {self.lever_mm:.2f}/{self.base_mm:.2f} mm"
            )
        return math.acos(cos_phi)


@dataclass(frozen=True)
class ArcLink:
    """Circular guide: angle is travel over radius, small and exact."""

    radius_mm: float

    def angle_deg(self, travel_mm: float) -> float:
        return math.degrees(travel_mm / self.radius_mm)


Link = Union[CrankLink, ArcLink]


@dataclass(frozen=True)
class AxisConfig:
    """One screw axis: drivetrain numbers plus the travel-to-angle link."""

    screw_lead_mm: float      # travel per screw revolution
    steps_per_rev: int
    stroke_mm: float
    v_max_mm_s: float
    max_step_rate: float      # steps/s ceiling for generated step commands
    link: Link


@dataclass(frozen=True)
class MechanismConfig:
    """Full mechanism description; validated on construction."""

    axes: Mapping[str, AxisConfig]
    pitch_limits_deg: tuple[float, float] = (0.0, 85.0)
    roll_limits_deg: tuple[float, float] = (0.0, 65.0)
    lateral_limits_deg: tuple[float, float] = (0.0, 35.0)
    thoracic_limits_deg: tuple[float, float] = (0.0, 30.0)
    trunk_axis_offset_mm: float = 180.0
    passive_height_range_mm: tuple[float, float] = (0.0, 120.0)

    @property
    def arc_radius_thoracic_mm(self) -> float:
        return self.axes[THORACIC].link.radius_mm

    @property
    def pendulum_arc_radius_mm(self) -> float:
        return self.axes[BASE].link.radius_mm

    def __post_init__(self):
        for name in AXES:
            if name not in self.axes:
                raise ConfigurationError(f"axis {name!r} missing from config")
        for name, ax in self.axes.items():
            if ax.screw_lead_mm <= 0 or ax.stroke_mm <= 0:
                raise ConfigurationError(f"axis {name!r}: lead and stroke must be positive")
            if ax.steps_per_rev <= 0 or ax.v_max_mm_s <= 0 or ax.max_step_rate <= 0:
                raise ConfigurationError(f"axis {name!r}: drivetrain numbers must be positive")
            if isinstance(ax.link, ArcLink) and ax.link.radius_mm <= 0:
                raise ConfigurationError(f"axis {name!r}: arc radius must be positive")
            self._check_monotone(name, ax)
        for label, (lo, hi) in (
            ("pitch", self.pitch_limits_deg),
            ("roll", self.roll_limits_deg),
            ("lateral", self.lateral_limits_deg),
            ("thoracic", self.thoracic_limits_deg),
            ("passive height", self.passive_height_range_mm),
        ):
            if lo > hi:
                raise ConfigurationError(f"{label} limits are reversed: [{lo}, {hi}]")
        if self.lateral_limits_deg[1] + self.thoracic_limits_deg[1] < self.roll_limits_deg[1]:
            raise ConfigurationError(
                "lateral and thoracic limits cannot reach the roll limit: "
                f"{self.lateral_limits_deg[1]} + {self.thoracic_limits_deg[1]} "
                f"< {self.roll_limits_deg[1]}"
            )
        if self.trunk_axis_offset_mm <= 0:
            raise ConfigurationError("trunk axis offset must be positive")

    def _check_monotone(self, name: str, ax: AxisConfig, samples: int = 33):
        # also proves the crank triangle stays reachable across the stroke
        prev = ax.link.angle_deg(0.0)
        for i in range(1, samples + 1):
            cur = ax.link.angle_deg(ax.stroke_mm * i / samples)
            if cur <= prev:
                raise ConfigurationError(f"axis {name!r}: FK is not strictly increasing")
            prev = cur


# Default geometry. Crank links are calibrated so the full stroke spans the
# declared angle range (85 deg pitch, 35 deg lateral); arc strokes likewise
# cover 30 deg thoracic and 35 deg base with a hair to spare.
def default_mechanism_config() -> MechanismConfig:
    return MechanismConfig(
        axes={
            PITCH: AxisConfig(4.0, 500, 400.0, 10.0, 3000.0, CrankLink(322.73, 322.73, 112.08)),
            LATERAL: AxisConfig(3.0, 500, 180.0, 10.0, 3000.0, CrankLink(312.39, 312.39, 108.50)),
            THORACIC: AxisConfig(2.0, 500, 157.08, 10.0, 3000.0, ArcLink(300.0)),
            BASE: AxisConfig(3.0, 500, 256.57, 10.0, 3000.0, ArcLink(420.0)),
        }
    )


def _check_travel(axis: str, travel_mm: float, config: MechanismConfig):
    stroke = config.axes[axis].stroke_mm
    if not 0.0 <= travel_mm <= stroke:
        raise RangeError(
            f"{axis} travel {travel_mm:.3f} mm outside [0.000, {stroke:.3f}] mm"
        )


def fk_axis(axis: str, travel_mm: float, config: MechanismConfig) -> float:
    """Angle of one axis at the given screw travel, degrees."""
    if axis not in config.axes:
        raise InputError(f"unknown axis {axis!r}")
    _check_travel(axis, travel_mm, config)
    return config.axes[axis].link.angle_deg(travel_mm)


def fk_pitch(travel_mm: float, config: MechanismConfig) -> float:
    return fk_axis(PITCH, travel_mm, config)


def fk_lateral(travel_mm: float, config: MechanismConfig) -> float:
    return fk_axis(LATERAL, travel_mm, config)


def fk_thoracic(travel_mm: float, config: MechanismConfig) -> float:
    return fk_axis(THORACIC, travel_mm, config)


def fk_base(travel_mm: float, config: MechanismConfig) -> float:
    return fk_axis(BASE, travel_mm, config)


def roll_total(theta_lateral_deg: float, theta_thoracic_deg: float) -> float:
    """Trunk roll produced by the waist and thoracic axes together."""
    return theta_lateral_deg + theta_thoracic_deg


def base_sync(theta_lateral_deg: float) -> float:
    """Base angle slaved to lateral bending (one-to-one).

    Keeping the base tilted exactly as far as the waist keeps the pendulum
    rotation centre coincident with the waist centre, which is what holds the
    waist-to-base distance constant.
    """
    return theta_lateral_deg


def inverse_axis(axis: str, theta_deg: float, config: MechanismConfig) -> float:
    """Travel that produces the requested axis angle, by bisection.

    The per-axis FK is strictly monotone over the stroke, so plain bisection
    on the travel bracket converges unconditionally; 80 halvings leave the
    bracket far below any mechanical resolution.
    """
    if axis not in config.axes:
        raise InputError(f"unknown axis {axis!r}")
    stroke = config.axes[axis].stroke_mm
    link = config.axes[axis].link
    lo_deg = link.angle_deg(0.0)
    hi_deg = link.angle_deg(stroke)
    if theta_deg < lo_deg - ANGLE_TOL_DEG or theta_deg > hi_deg + ANGLE_TOL_DEG:
        raise RangeError(
            f"{axis} angle {theta_deg:.4f} deg outside [{lo_deg:.4f}, {hi_deg:.4f}] deg"
        )
    theta = min(max(theta_deg, lo_deg), hi_deg)
    lo, hi = 0.0, stroke
    for _ in range(_BISECT_ITERS):
        mid = 0.5 * (lo + hi)
        if link.angle_deg(mid) < theta:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@dataclass(frozen=True)
class JointState:
    """Travels of the four screws plus the angles they produce.

    Instances come from :func:`joint_state`, which derives the angles from
    the travels, so the two views can never disagree.
    """

    travel_pitch_mm: float
    travel_lateral_mm: float
    travel_thoracic_mm: float
    travel_base_mm: float
    passive_height_mm: float
    theta_pitch_deg: float
    theta_lateral_deg: float
    theta_thoracic_deg: float
    theta_base_deg: float

    @property
    def roll_deg(self) -> float:
        return roll_total(self.theta_lateral_deg, self.theta_thoracic_deg)

    @property
    def pitch_deg(self) -> float:
        return self.theta_pitch_deg

    def travels(self) -> dict[str, float]:
        return {
            PITCH: self.travel_pitch_mm,
            LATERAL: self.travel_lateral_mm,
            THORACIC: self.travel_thoracic_mm,
            BASE: self.travel_base_mm,
        }


def joint_state(
    config: MechanismConfig,
    travels: Mapping[str, float],
    passive_height_mm: float = 0.0,
) -> JointState:
    """Build a validated JointState from screw travels."""
    for axis in AXES:
        if axis not in travels:
            raise InputError(f"travel for axis {axis!r} missing")
        _check_travel(axis, travels[axis], config)
    h_lo, h_hi = config.passive_height_range_mm
    if not h_lo <= passive_height_mm <= h_hi:
        raise RangeError(
            f"passive height {passive_height_mm:.1f} mm outside [{h_lo:.1f}, {h_hi:.1f}] mm"
        )
    angles = {axis: config.axes[axis].link.angle_deg(travels[axis]) for axis in AXES}
    roll = roll_total(angles[LATERAL], angles[THORACIC])
    r_lo, r_hi = config.roll_limits_deg
    if not r_lo - ROLL_SLACK_DEG <= roll <= r_hi + ROLL_SLACK_DEG:
        raise RangeError(f"roll {roll:.4f} deg outside [{r_lo:.1f}, {r_hi:.1f}] deg")
    return JointState(
        travel_pitch_mm=travels[PITCH],
        travel_lateral_mm=travels[LATERAL],
        travel_thoracic_mm=travels[THORACIC],
        travel_base_mm=travels[BASE],
        passive_height_mm=passive_height_mm,
        theta_pitch_deg=angles[PITCH],
        theta_lateral_deg=angles[LATERAL],
        theta_thoracic_deg=angles[THORACIC],
        theta_base_deg=angles[BASE],
    )


def _check_interval(name: str, value: float, limits: tuple[float, float]):
    lo, hi = limits
    if not lo <= value <= hi:
        raise RangeError(f"{name} {value:.4f} deg outside [{lo:.1f}, {hi:.1f}] deg")


def ik(
    roll_deg: float,
    pitch_deg: float,
    split: tuple[float, float],
    config: MechanismConfig,
    passive_height_mm: float = 0.0,
) -> JointState:
    """Screw travels that realise the requested posture.

    ``split`` is the (lateral, thoracic) share of the roll; it must sum to
    ``roll_deg`` and respect the per-axis limits. The base travel is derived
    from the lateral angle through :func:`base_sync`.
    """
    _check_interval("roll", roll_deg, config.roll_limits_deg)
    _check_interval("pitch", pitch_deg, config.pitch_limits_deg)
    lat_deg, thor_deg = split
    _check_interval("lateral", lat_deg, config.lateral_limits_deg)
    _check_interval("thoracic", thor_deg, config.thoracic_limits_deg)
    if abs(roll_total(lat_deg, thor_deg) - roll_deg) > SPLIT_TOL_DEG:
        raise InputError(
            f"split {lat_deg:.4f} + {thor_deg:.4f} deg does not sum to roll {roll_deg:.4f} deg"
        )
    travels = {
        PITCH: inverse_axis(PITCH, pitch_deg, config),
        LATERAL: inverse_axis(LATERAL, lat_deg, config),
        THORACIC: inverse_axis(THORACIC, thor_deg, config),
        BASE: inverse_axis(BASE, base_sync(lat_deg), config),
    }
    return joint_state(config, travels, passive_height_mm)


@dataclass(frozen=True)
class StepCommand:
    """Signed step count for one axis over one schedule sample."""

    axis: str
    steps: int
    rate_steps_s: float


def _round_half_away(x: float) -> int:
    return int(math.copysign(math.floor(abs(x) + 0.5), x))


def travel_to_steps(delta_mm: float, axis: str, config: MechanismConfig) -> int:
    """Whole motor steps closest to a travel delta (half rounds away from zero).

    The quantisation error is at most lead / (2 * steps_per_rev) of travel.
    """
    ax = config.axes[axis]
    return _round_half_away(delta_mm / ax.screw_lead_mm * ax.steps_per_rev)


def steps_to_travel(steps: int, axis: str, config: MechanismConfig) -> float:
    ax = config.axes[axis]
    return steps * ax.screw_lead_mm / ax.steps_per_rev


@dataclass(frozen=True)
class PendulumPose:
    """Frontal-plane pose of the waist and base plates at one lateral angle."""

    waist_point_mm: tuple[float, float]
    base_point_mm: tuple[float, float]
    plate_normal: tuple[float, float]    # shared by both plates (they stay parallel)
    gap_mm: float


def pendulum_pose(theta_lateral_deg: float, config: MechanismConfig) -> PendulumPose:
    """Where the two plates sit when the base follows the waist.

    Both plates rotate about the shared centre (the pendulum arc centre,
    which the waist bending axis is built to coincide with), so their
    separation and relative orientation cannot change. Everything is in the
    frontal plane: first coordinate lateral, second vertical, origin at the
    base plate home position.
    """
    radius = config.pendulum_arc_radius_mm
    centre = (0.0, radius)
    waist_home = (0.0, radius - config.trunk_axis_offset_mm)
    base_home = (0.0, 0.0)
    theta = math.radians(theta_lateral_deg)
    cos_t, sin_t = math.cos(theta), math.sin(theta)

    def rotate(p: tuple[float, float]) -> tuple[float, float]:
        dy, dz = p[0] - centre[0], p[1] - centre[1]
        return (centre[0] + cos_t * dy - sin_t * dz, centre[1] + sin_t * dy + cos_t * dz)

    waist = rotate(waist_home)
    base = rotate(base_home)
    gap = math.hypot(waist[0] - base[0], waist[1] - base[1])
    return PendulumPose(
        waist_point_mm=waist,
        base_point_mm=base,
        plate_normal=(-sin_t, cos_t),
        gap_mm=gap,
    )
