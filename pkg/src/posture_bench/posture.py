"""Chest-plane posture estimation from tracked probe positions.

A position-tracked ultrasound probe is swept over the chest while the seat
holds still; the sampled positions approximate a plane. The total
least-squares fit of that plane gives a normal vector, and two angles are read
off the normal. World frame: x points out of an upright chest, y to the
patient's left, z up; gravity is -z.

Two constructions live here and they are not the same rotation:

* the scan-plane chart ``compose_normal`` / ``plane_to_posture``, which maps
  (roll, pitch) to a unit normal and back. It is the exact inverse pair used
  to describe where the fitted plane points.
* the body-axes construction ``body_axes`` / ``posture_to_gravity``, which
  pitches the anatomical axes about y and then leans them about x, and
  measures how far each body axis line tips from the horizontal plane. These
  gravity angles are the load-relevant quantities.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import InputError, PlanningError

TRACK_HEADER = ("t", "x", "y", "z")

# rank test: the track must spread in two directions to pin a plane down
_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class PostureAngles:
    roll_deg: float
    pitch_deg: float


@dataclass(frozen=True)
class GravityAngles:
    """Tilt of the body axis lines away from horizontal, both in [0, 90]."""

    roll_deg: float
    pitch_deg: float


@dataclass(frozen=True)
class ProbeTrack:
    """Timestamped probe positions, seconds and millimetres."""

    times_s: np.ndarray
    points_mm: np.ndarray

    def __post_init__(self):
        t = np.asarray(self.times_s, dtype=float)
        p = np.asarray(self.points_mm, dtype=float)
        if p.ndim != 2 or p.shape[1] != 3 or t.shape != (p.shape[0],):
            raise InputError("track needs one (x, y, z) row per timestamp")
        if not (np.all(np.isfinite(t)) and np.all(np.isfinite(p))):
            raise InputError("track contains non-finite values")
        if np.any(np.diff(t) < 0):
            raise InputError("track timestamps must be non-decreasing")
        object.__setattr__(self, "times_s", t)
        object.__setattr__(self, "points_mm", p)


@dataclass(frozen=True)
class ChestPlane:
    """Fitted plane: unit normal, centroid, and RMS orthogonal residual."""

    normal: tuple[float, float, float]
    centroid_mm: tuple[float, float, float]
    rms_residual_mm: float


def load_track(path: str | Path) -> ProbeTrack:
    """Read a probe track CSV (header ``t,x,y,z``, seconds and millimetres)."""
    rows = []
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise InputError(f"{path}: empty track file") from None
        if tuple(h.strip() for h in header) != TRACK_HEADER:
            raise InputError(f"{path}: expected header t,x,y,z, got {','.join(header)!r}")
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != 4:
                raise InputError(f"{path}:{lineno}: expected 4 columns, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric value") from None
    if not rows:
        raise InputError(f"{path}: no samples")
    data = np.asarray(rows, dtype=float)
    return ProbeTrack(times_s=data[:, 0], points_mm=data[:, 1:4])


def fit_plane(track: ProbeTrack) -> ChestPlane:
    """Total least-squares plane through the track points.

    The normal is the covariance eigenvector with the smallest eigenvalue.
    The sign is fixed so the normal points out of the chest: positive x
    component, ties broken toward positive z, then positive y.

    Raises
    ------
    InputError
        Fewer than three points, or points that do not spread in two
        directions (collinear or coincident), judged by the ratio of the
        middle to the largest covariance eigenvalue.
    """
    pts = track.points_mm
    if pts.shape[0] < 3:
        raise InputError(f"plane fit needs at least 3 points, got {pts.shape[0]}")
    centroid = pts.mean(axis=0)
    centered = pts - centroid
    cov = centered.T @ centered / pts.shape[0]
    evals, evecs = np.linalg.eigh(cov)   # ascending
    if evals[2] <= 0.0 or evals[1] <= _RANK_RTOL * evals[2]:
        raise InputError("degenerate track: points are collinear or coincident")
    normal = evecs[:, 0]
    nx, ny, nz = normal
    if nx < 0 or (nx == 0 and (nz < 0 or (nz == 0 and ny < 0))):
        normal = -normal
    rms = float(np.sqrt(np.mean((centered @ normal) ** 2)))
    return ChestPlane(
        normal=(float(normal[0]), float(normal[1]), float(normal[2])),
        centroid_mm=(float(centroid[0]), float(centroid[1]), float(centroid[2])),
        rms_residual_mm=rms,
    )


def compose_normal(roll_deg: float, pitch_deg: float) -> tuple[float, float, float]:
    """Unit chest normal at the given posture, scan-plane chart.

    Starting from the upright normal (1, 0, 0): pitch swings it in the x-z
    plane, roll then tips it toward y. The chart is built so that
    :func:`plane_to_posture` inverts it exactly.
    """
    r = math.radians(roll_deg)
    p = math.radians(pitch_deg)
    return (math.cos(r) * math.cos(p), math.sin(r), math.cos(r) * math.sin(p))


def plane_to_posture(plane: ChestPlane) -> PostureAngles:
    """Angles of the fitted normal: pitch = atan2(nz, nx), roll = asin(ny)."""
    nx, ny, nz = plane.normal
    ny = min(1.0, max(-1.0, ny))
    return PostureAngles(
        roll_deg=math.degrees(math.asin(ny)),
        pitch_deg=math.degrees(math.atan2(nz, nx)),
    )


def body_axes(roll_deg: float, pitch_deg: float) -> np.ndarray:
    """Anatomical axes after pitching about y, then leaning about x.

    Returns a 3x3 array whose columns are the sagittal (front-back), frontal
    (left-right) and longitudinal (head-foot) axis directions in the world
    frame. Pitch tips the sagittal axis up; the lean then carries the frontal
    and longitudinal axes sideways.
    """
    r = math.radians(roll_deg)
    p = math.radians(pitch_deg)
    pitch_rot = np.array([
        [math.cos(p), 0.0, -math.sin(p)],
        [0.0, 1.0, 0.0],
        [math.sin(p), 0.0, math.cos(p)],
    ])
    lean_rot = np.array([
        [1.0, 0.0, 0.0],
        [0.0, math.cos(r), -math.sin(r)],
        [0.0, math.sin(r), math.cos(r)],
    ])
    return lean_rot @ pitch_rot


_GRAVITY = np.array([0.0, 0.0, -1.0])


def posture_to_gravity(angles: PostureAngles) -> GravityAngles:
    """Gravity angles of a posture.

    Each angle is 90 deg minus the unsigned angle between gravity and the
    corresponding body axis line (frontal for roll, sagittal for pitch), i.e.
    how far that axis has tipped out of the horizontal plane. Axis *lines*
    carry no sign, so both outputs land in [0, 90].
    """
    axes = body_axes(angles.roll_deg, angles.pitch_deg)
    sagittal = axes[:, 0]
    frontal = axes[:, 1]

    def tilt(axis: np.ndarray) -> float:
        return math.degrees(math.asin(min(1.0, abs(float(np.dot(_GRAVITY, axis))))))

    return GravityAngles(roll_deg=tilt(frontal), pitch_deg=tilt(sagittal))


def gravity_preimage(
    target: GravityAngles,
    roll_limits_deg: tuple[float, float] = (0.0, 65.0),
    pitch_limits_deg: tuple[float, float] = (0.0, 85.0),
) -> PostureAngles:
    """Posture whose gravity angles match ``target``, found numerically.

    Within the first quadrant the gravity roll depends only on roll and the
    gravity pitch grows with pitch at fixed roll, so two nested bisections
    pin the preimage down. Raises PlanningError when the target cannot be
    reached inside the given posture box.
    """

    def grav(roll: float, pitch: float) -> GravityAngles:
        return posture_to_gravity(PostureAngles(roll, pitch))

    def bisect(fn, lo: float, hi: float, want: float, what: str) -> float:
        f_lo, f_hi = fn(lo), fn(hi)
        if not f_lo - 1e-9 <= want <= f_hi + 1e-9:
            raise PlanningError(
                f"gravity {what} {want:.2f} deg unreachable inside "
                f"[{lo:.1f}, {hi:.1f}] deg (covers [{f_lo:.2f}, {f_hi:.2f}])"
            )
        for _ in range(60):
            mid = 0.5 * (lo + hi)
            if fn(mid) < want:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    roll = bisect(
        lambda r: grav(r, 0.0).roll_deg,
        roll_limits_deg[0], min(roll_limits_deg[1], 90.0),
        target.roll_deg, "roll",
    )
    pitch = bisect(
        lambda p: grav(roll, p).pitch_deg,
        pitch_limits_deg[0], min(pitch_limits_deg[1], 90.0),
        target.pitch_deg, "pitch",
    )
    return PostureAngles(roll_deg=roll, pitch_deg=pitch)
