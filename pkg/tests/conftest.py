"""Shared fixtures and synthetic-data helpers."""

from __future__ import annotations

import numpy as np
import pytest

from posture_bench.config import BenchConfig
from posture_bench.kinematics import default_mechanism_config
from posture_bench.posture import ProbeTrack, compose_normal


@pytest.fixture
def mech():
    return default_mechanism_config()


@pytest.fixture
def config():
    return BenchConfig()


def plane_track(
    roll_deg: float,
    pitch_deg: float,
    n: int = 200,
    noise_mm: float = 0.0,
    seed: int = 0,
    extent_mm: float = 150.0,
    centroid=(400.0, 30.0, 250.0),
) -> ProbeTrack:
    """Probe sweep over a chest-sized patch of a plane with known tilt."""
    rng = np.random.default_rng(seed)
    normal = np.asarray(compose_normal(roll_deg, pitch_deg))
    seed_vec = np.array([0.0, 0.0, 1.0]) if abs(normal[2]) < 0.9 else np.array([0.0, 1.0, 0.0])
    u = np.cross(normal, seed_vec)
    u /= np.linalg.norm(u)
    v = np.cross(normal, u)
    coeffs = rng.uniform(-extent_mm, extent_mm, size=(n, 2))
    pts = np.asarray(centroid) + coeffs[:, :1] * u + coeffs[:, 1:] * v
    if noise_mm > 0.0:
        pts = pts + rng.normal(0.0, noise_mm, size=pts.shape)
    return ProbeTrack(times_s=np.arange(n) / 20.0, points_mm=pts)
