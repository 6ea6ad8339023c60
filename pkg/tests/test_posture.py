"""Plane fitting, posture extraction and gravity-referenced angles."""

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import plane_track
from posture_bench.errors import InputError, PlanningError
from posture_bench.posture import (
    ChestPlane,
    GravityAngles,
    PostureAngles,
    ProbeTrack,
    body_axes,
    compose_normal,
    fit_plane,
    gravity_preimage,
    load_track,
    plane_to_posture,
    posture_to_gravity,
)


def _angles_of(track) -> PostureAngles:
    return plane_to_posture(fit_plane(track))


# -- plane fitting -----------------------------------------------------------

def test_fit_recovers_upright_plane_exactly():
    got = _angles_of(plane_track(0.0, 0.0, n=50))
    assert got.roll_deg == pytest.approx(0.0, abs=1e-9)
    assert got.pitch_deg == pytest.approx(0.0, abs=1e-9)


def test_fit_recovers_tilted_plane_exactly():
    got = _angles_of(plane_track(15.0, 60.0, n=50))
    assert got.roll_deg == pytest.approx(15.0, abs=1e-9)
    assert got.pitch_deg == pytest.approx(60.0, abs=1e-9)


def test_fit_recovers_tilted_plane_under_noise():
    got = _angles_of(plane_track(15.0, 60.0, n=200, noise_mm=2.0, seed=7))
    assert got.roll_deg == pytest.approx(15.0, abs=1.0)
    assert got.pitch_deg == pytest.approx(60.0, abs=1.0)


def test_fit_reports_noise_as_residual():
    clean = fit_plane(plane_track(10.0, 30.0, n=500))
    noisy = fit_plane(plane_track(10.0, 30.0, n=500, noise_mm=2.0, seed=3))
    assert clean.rms_residual_mm == pytest.approx(0.0, abs=1e-9)
    # isotropic sigma=2 mm leaves close to 2 mm of orthogonal residual
    assert noisy.rms_residual_mm == pytest.approx(2.0, abs=0.4)


def test_fit_centroid_is_point_mean():
    track = plane_track(5.0, 20.0, n=64, seed=2)
    plane = fit_plane(track)
    assert np.allclose(plane.centroid_mm, track.points_mm.mean(axis=0), atol=1e-9)


def test_fit_normal_sign_points_out_of_chest():
    plane = fit_plane(plane_track(25.0, 70.0, n=80))
    assert plane.normal[0] > 0.0


def test_fit_rejects_too_few_points():
    track = ProbeTrack(times_s=np.array([0.0, 0.1]), points_mm=np.zeros((2, 3)))
    with pytest.raises(InputError, match="at least 3"):
        fit_plane(track)


def test_fit_rejects_collinear_points():
    pts = np.outer(np.linspace(0.0, 1.0, 40), np.array([1.0, 2.0, 3.0]))
    track = ProbeTrack(times_s=np.arange(40.0), points_mm=pts)
    with pytest.raises(InputError, match="degenerate"):
        fit_plane(track)


def test_track_validation():
    with pytest.raises(InputError, match="row per timestamp"):
        ProbeTrack(times_s=np.arange(3.0), points_mm=np.zeros((4, 3)))
    with pytest.raises(InputError, match="non-decreasing"):
        ProbeTrack(times_s=np.array([0.0, 2.0, 1.0]), points_mm=np.zeros((3, 3)))
    with pytest.raises(InputError, match="non-finite"):
        ProbeTrack(times_s=np.arange(3.0), points_mm=np.full((3, 3), np.nan))


# -- track CSV ---------------------------------------------------------------

def test_load_track_round_trip(tmp_path):
    track = plane_track(12.0, 40.0, n=30, seed=5)
    path = tmp_path / "track.csv"
    lines = ["t,x,y,z"]
    for t, (x, y, z) in zip(track.times_s, track.points_mm):
        lines.append(f"{t:.6f},{x:.9f},{y:.9f},{z:.9f}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    loaded = load_track(path)
    assert np.allclose(loaded.points_mm, track.points_mm, atol=1e-8)
    got = _angles_of(loaded)
    assert got.roll_deg == pytest.approx(12.0, abs=1e-6)
    assert got.pitch_deg == pytest.approx(40.0, abs=1e-6)


def test_load_track_rejects_bad_header(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("time,x,y,z\n0,1,2,3\n", encoding="utf-8")
    with pytest.raises(InputError, match="header"):
        load_track(path)


def test_load_track_reports_bad_line_number(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("t,x,y,z\n0,1,2,3\n0.1,1,2\n", encoding="utf-8")
    with pytest.raises(InputError, match=":3"):
        load_track(path)
    path.write_text("t,x,y,z\n0,1,2,oops\n", encoding="utf-8")
    with pytest.raises(InputError, match="non-numeric"):
        load_track(path)
    path.write_text("t,x,y,z\n", encoding="utf-8")
    with pytest.raises(InputError, match="no samples"):
        load_track(path)


# -- posture chart -----------------------------------------------------------

def test_extraction_reference_points():
    upright = ChestPlane(normal=(1.0, 0.0, 0.0), centroid_mm=(0, 0, 0), rms_residual_mm=0.0)
    flat = ChestPlane(normal=(0.0, 0.0, 1.0), centroid_mm=(0, 0, 0), rms_residual_mm=0.0)
    a = plane_to_posture(upright)
    assert (a.roll_deg, a.pitch_deg) == (0.0, 0.0)
    b = plane_to_posture(flat)
    assert b.roll_deg == pytest.approx(0.0, abs=1e-12)
    assert b.pitch_deg == pytest.approx(90.0, abs=1e-12)


def test_compose_extract_round_trip_grid():
    worst = 0.0
    for roll in np.linspace(-30.0, 30.0, 25):
        for pitch in np.linspace(0.0, 85.0, 25):
            n = compose_normal(roll, pitch)
            got = plane_to_posture(ChestPlane(n, (0, 0, 0), 0.0))
            worst = max(worst, abs(got.roll_deg - roll), abs(got.pitch_deg - pitch))
    assert worst <= 1e-9


@given(
    roll=st.floats(min_value=-30.0, max_value=30.0),
    pitch=st.floats(min_value=0.0, max_value=85.0),
)
def test_composed_normal_is_unit(roll, pitch):
    assert np.linalg.norm(compose_normal(roll, pitch)) == pytest.approx(1.0, abs=1e-12)


# -- gravity angles ----------------------------------------------------------

def test_body_axes_are_orthonormal():
    for roll, pitch in [(0.0, 0.0), (20.0, 45.0), (-15.0, 70.0), (35.0, 85.0)]:
        axes = body_axes(roll, pitch)
        assert np.allclose(axes.T @ axes, np.eye(3), atol=1e-12)


def test_gravity_angles_closed_forms():
    # pure lean tips only the frontal axis; pure recline only the sagittal
    g = posture_to_gravity(PostureAngles(20.0, 0.0))
    assert g.roll_deg == pytest.approx(20.0, abs=1e-9)
    assert g.pitch_deg == pytest.approx(0.0, abs=1e-9)
    g = posture_to_gravity(PostureAngles(0.0, 45.0))
    assert g.roll_deg == pytest.approx(0.0, abs=1e-9)
    assert g.pitch_deg == pytest.approx(45.0, abs=1e-9)
    # combined posture: roll passes straight through, pitch is shrunk by cos(roll)
    g = posture_to_gravity(PostureAngles(20.0, 45.0))
    assert g.roll_deg == pytest.approx(20.0, abs=1e-9)
    expected = math.degrees(math.asin(math.sin(math.radians(45)) * math.cos(math.radians(20))))
    assert g.pitch_deg == pytest.approx(expected, abs=1e-9)


@given(
    roll=st.floats(min_value=-65.0, max_value=65.0),
    pitch=st.floats(min_value=-85.0, max_value=85.0),
)
def test_gravity_angles_are_even_and_bounded(roll, pitch):
    g = posture_to_gravity(PostureAngles(roll, pitch))
    m = posture_to_gravity(PostureAngles(-roll, -pitch))
    assert 0.0 <= g.roll_deg <= 90.0
    assert 0.0 <= g.pitch_deg <= 90.0
    assert g.roll_deg == pytest.approx(m.roll_deg, abs=1e-9)
    assert g.pitch_deg == pytest.approx(m.pitch_deg, abs=1e-9)


def _preimage_grid_oracle(target: GravityAngles) -> PostureAngles:
    """Coarse-to-fine 2-D search, independent of the nested bisection."""
    best = None
    lo_r, hi_r, lo_p, hi_p = 0.0, 65.0, 0.0, 85.0
    for _ in range(6):
        rolls = np.linspace(lo_r, hi_r, 41)
        pitches = np.linspace(lo_p, hi_p, 41)
        best = min(
            ((r, p) for r in rolls for p in pitches),
            key=lambda rp: (
                (posture_to_gravity(PostureAngles(*rp)).roll_deg - target.roll_deg) ** 2
                + (posture_to_gravity(PostureAngles(*rp)).pitch_deg - target.pitch_deg) ** 2
            ),
        )
        dr, dp = (hi_r - lo_r) / 40, (hi_p - lo_p) / 40
        lo_r, hi_r = max(0.0, best[0] - dr), min(65.0, best[0] + dr)
        lo_p, hi_p = max(0.0, best[1] - dp), min(85.0, best[1] + dp)
    return PostureAngles(*best)


def test_gravity_preimage_matches_grid_oracle():
    target = GravityAngles(20.0, 45.0)
    got = gravity_preimage(target)
    oracle = _preimage_grid_oracle(target)
    assert got.roll_deg == pytest.approx(oracle.roll_deg, abs=1e-3)
    assert got.pitch_deg == pytest.approx(oracle.pitch_deg, abs=1e-3)
    # and the preimage really lands on the target
    back = posture_to_gravity(got)
    assert back.roll_deg == pytest.approx(20.0, abs=1e-9)
    assert back.pitch_deg == pytest.approx(45.0, abs=1e-9)


def test_gravity_preimage_needs_more_pitch_than_target():
    # leaning shrinks the gravity pitch, so the posture pitch must overshoot
    got = gravity_preimage(GravityAngles(20.0, 45.0))
    assert got.roll_deg == pytest.approx(20.0, abs=1e-9)
    assert got.pitch_deg > 45.0
    assert got.pitch_deg == pytest.approx(48.8056, abs=1e-3)


def test_gravity_preimage_unreachable_is_reported():
    with pytest.raises(PlanningError, match="unreachable"):
        gravity_preimage(GravityAngles(70.0, 45.0))
    with pytest.raises(PlanningError, match="unreachable"):
        gravity_preimage(GravityAngles(20.0, 89.0), pitch_limits_deg=(0.0, 50.0))
