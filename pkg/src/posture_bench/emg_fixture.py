"""Reference six-subject recording set for regression tests.

The subjects are synthetic. Each channel is seeded white noise scaled so the
processing chain lands on a designed per-condition load, which makes the
across-subject medians of the four condition ratios reproduce the reference
values the regression suite checks against.

The per-subject ratio tables below were solved by hand. The constraint that
makes this non-trivial: for each subject (B/A) * (D/B) must equal (D/A)
identically, yet the across-subject medians of the three ratios are fixed
independently. With six subjects the median is the mean of the 3rd and 4th
order statistics, so each target ratio pins two subjects at the target value
with two below and two above, and the pinned pair differs between ratios.

Materialise with ``build_fixture(dest)`` or ``python -m
posture_bench.emg_fixture DEST``; the output is bit-stable.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .emg import (
    CONDITIONS,
    DEFAULT_BAND_HZ,
    DEFAULT_FILTER_ORDER,
    DEFAULT_WINDOW_S,
    bandpass_array,
    channel_load,
    rms_envelope_array,
)

SUBJECTS = ("S1", "S2", "S3", "S4", "S5", "S6")
SAMPLE_RATE_HZ = 2000.0
DURATION_S = 6.0
_SEED_ROOT = 9157

# per-subject ratios, one entry per subject in SUBJECTS order
_LEG_B_OVER_A = [0.73, 0.76, 0.785, 0.785, 0.82, 0.85]
_LEG_D_OVER_B = [0.86, 0.691 / 0.76, 0.872, 0.886, 0.691 / 0.82, 0.93]
_LEG_D_OVER_C = [0.89, 0.91, 0.924, 0.924, 0.95, 0.97]
_ABD_B_OVER_A = [0.70, 0.73, 0.754, 0.754, 0.79, 0.82]
_ABD_D_OVER_B = [0.90, 1.01, 1.93 - 0.736 / 0.754, 0.736 / 0.754, 0.736 / 0.79, 1.03]
_ABD_D_OVER_C = [0.93, 0.95, 0.964, 0.964, 0.99, 1.01]

# baseline condition-A group loads, mV; spread for variety
_LEG_A = [1.10, 0.95, 1.20, 1.05, 0.90, 1.15]
_ABD_A = [0.80, 0.88, 0.75, 0.92, 0.85, 0.78]

# how each group load divides between the left and right channel
_SIDE_SHARE = {
    "gastrocnemius": {"left": 0.54, "right": 0.46},
    "oblique_abdominal": {"left": 0.52, "right": 0.48},
}

COLUMNS = (
    "gastrocnemius_left",
    "gastrocnemius_right",
    "oblique_abdominal_left",
    "oblique_abdominal_right",
)


def subject_loads() -> dict[str, dict[str, dict[str, float]]]:
    """Designed group loads: subject -> condition -> {legs, abdomen}."""
    out: dict[str, dict[str, dict[str, float]]] = {}
    for i, subject in enumerate(SUBJECTS):
        legs_a = _LEG_A[i]
        legs_b = _LEG_B_OVER_A[i] * legs_a
        legs_d = _LEG_D_OVER_B[i] * legs_b
        legs_c = legs_d / _LEG_D_OVER_C[i]
        abd_a = _ABD_A[i]
        abd_b = _ABD_B_OVER_A[i] * abd_a
        abd_d = _ABD_D_OVER_B[i] * abd_b
        abd_c = abd_d / _ABD_D_OVER_C[i]
        out[subject] = {
            "A": {"legs": legs_a, "abdomen": abd_a},
            "B": {"legs": legs_b, "abdomen": abd_b},
            "C": {"legs": legs_c, "abdomen": abd_c},
            "D": {"legs": legs_d, "abdomen": abd_d},
        }
    return out


def _channel_target(loads: dict[str, float], column: str) -> float:
    muscle, side = column.rsplit("_", 1)
    group = "legs" if muscle == "gastrocnemius" else "abdomen"
    return loads[group] * _SIDE_SHARE[muscle][side]


def _calibrated_channel(rng: np.random.Generator, n: int, target: float) -> np.ndarray:
    """Unit noise scaled so the full chain reads exactly ``target``.

    The chain is linear up to the envelope and the envelope and median are
    positively homogeneous, so one measurement of the unit realisation fixes
    the scale.
    """
    raw = rng.standard_normal(n)
    filtered = bandpass_array(raw, SAMPLE_RATE_HZ, *DEFAULT_BAND_HZ, DEFAULT_FILTER_ORDER)
    unit_load = channel_load(rms_envelope_array(filtered, SAMPLE_RATE_HZ, DEFAULT_WINDOW_S))
    return raw * (target / unit_load)


def build_fixture(dest: str | Path) -> Path:
    """Write the CSV recordings and channel-map sidecar under ``dest``."""
    dest = Path(dest)
    dest.mkdir(parents=True, exist_ok=True)
    n = int(round(DURATION_S * SAMPLE_RATE_HZ))
    loads = subject_loads()
    for si, subject in enumerate(SUBJECTS):
        subject_dir = dest / subject
        subject_dir.mkdir(exist_ok=True)
        for ci, cond in enumerate(sorted(CONDITIONS)):
            columns = {}
            for ki, column in enumerate(COLUMNS):
                rng = np.random.default_rng([_SEED_ROOT, si, ci, ki])
                target = _channel_target(loads[subject][cond], column)
                columns[column] = _calibrated_channel(rng, n, target)
            path = subject_dir / f"{cond}.csv"
            with open(path, "w", encoding="utf-8", newline="\n") as fh:
                fh.write("t," + ",".join(COLUMNS) + "\n")
                for k in range(n):
                    vals = ",".join(f"{columns[c][k]:.10e}" for c in COLUMNS)
                    fh.write(f"{k / SAMPLE_RATE_HZ:.4f},{vals}\n")
    channel_map = {
        column: {"muscle": column.rsplit("_", 1)[0], "side": column.rsplit("_", 1)[1]}
        for column in COLUMNS
    }
    with open(dest / "channels.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(channel_map, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return dest


def main(argv: list[str] | None = None) -> int:
    import argparse

    parser = argparse.ArgumentParser(description="materialise the reference EMG recording set")
    parser.add_argument("dest", help="output directory")
    args = parser.parse_args(argv)
    path = build_fixture(args.dest)
    print(f"wrote {len(SUBJECTS) * len(CONDITIONS)} recordings under {path}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
