"""Surface-EMG processing chain and condition-ratio reports.

The chain is deliberately boring: band-pass the raw channels, take a moving
RMS envelope, summarise each channel by the median of its envelope, and sum
the left and right channels of each muscle into a group load. Muscle loads
under the four seat conditions are then compared as ratios, and medians
across subjects summarise a study.

All of it is deterministic: same input bytes, same report bytes.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Union

import numpy as np
from scipy import signal

from .errors import ConfigurationError, InputError

MIN_SAMPLE_RATE_HZ = 1000.0
DEFAULT_BAND_HZ = (20.0, 450.0)
DEFAULT_FILTER_ORDER = 4
DEFAULT_WINDOW_S = 0.3

SIDES = ("left", "right")
MUSCLE_GROUPS = {"gastrocnemius": "legs", "oblique_abdominal": "abdomen"}
RATIO_KEYS = ("B/A", "D/B", "D/C", "D/A")


@dataclass(frozen=True)
class Condition:
    """One seat condition: pendulum state plus the commanded roll split."""

    pendulum: bool
    lateral_deg: float
    thoracic_deg: float


# The four comparison conditions. A is the reference without the pendulum
# base; B/C/D redistribute the same 20 deg of roll with the base active.
CONDITIONS: Mapping[str, Condition] = {
    "A": Condition(pendulum=False, lateral_deg=20.0, thoracic_deg=0.0),
    "B": Condition(pendulum=True, lateral_deg=20.0, thoracic_deg=0.0),
    "C": Condition(pendulum=True, lateral_deg=0.0, thoracic_deg=20.0),
    "D": Condition(pendulum=True, lateral_deg=10.0, thoracic_deg=10.0),
}


def _parse_role(name: str) -> tuple[str, str] | None:
    head, _, side = name.rpartition("_")
    if head and side in SIDES:
        return (head, side)
    return None


@dataclass(frozen=True)
class EmgRecord:
    """Equal-length EMG channels in millivolts at one sample rate.

    ``roles`` binds channel names to (muscle, side); when omitted it is
    parsed from ``<muscle>_<side>`` channel names.
    """

    sample_rate_hz: float
    channels: Mapping[str, np.ndarray]
    roles: Mapping[str, tuple[str, str]] = field(default=None)  # type: ignore[assignment]

    def __post_init__(self):
        if self.sample_rate_hz < MIN_SAMPLE_RATE_HZ:
            raise InputError(
                f"sample rate {self.sample_rate_hz:.1f} Hz below the "
                f"{MIN_SAMPLE_RATE_HZ:.0f} Hz minimum"
            )
        if not self.channels:
            raise InputError("record has no channels")
        clean = {}
        length = None
        for name, data in self.channels.items():
            arr = np.asarray(data, dtype=float)
            if arr.ndim != 1:
                raise InputError(f"channel {name!r} is not one-dimensional")
            if length is None:
                length = arr.shape[0]
            elif arr.shape[0] != length:
                raise InputError(f"channel {name!r} length differs from the others")
            if not np.all(np.isfinite(arr)):
                raise InputError(f"channel {name!r} contains non-finite samples")
            clean[name] = arr
        if length == 0:
            raise InputError("record has zero-length channels")
        object.__setattr__(self, "channels", clean)
        if self.roles is None:
            roles = {}
            for name in clean:
                parsed = _parse_role(name)
                if parsed is not None:
                    roles[name] = parsed
            object.__setattr__(self, "roles", roles)
        else:
            for name, (muscle, side) in self.roles.items():
                if name not in clean:
                    raise InputError(f"channel map names unknown channel {name!r}")
                if side not in SIDES:
                    raise InputError(f"channel {name!r}: side must be left or right, got {side!r}")

    @property
    def n_samples(self) -> int:
        return next(iter(self.channels.values())).shape[0]


def _design_bandpass(fs: float, lo_hz: float, hi_hz: float, order: int) -> np.ndarray:
    if not 0.0 < lo_hz < hi_hz:
        raise ConfigurationError(f"band edges must satisfy 0 < lo < hi, got {lo_hz}/{hi_hz}")
    if order < 1:
        raise ConfigurationError(f"filter order must be >= 1, got {order}")
    if fs <= 2.0 * hi_hz:
        raise ConfigurationError(
            f"sample rate {fs:.1f} Hz cannot carry a {hi_hz:.1f} Hz band edge"
        )
    # The filter runs forward and backward, which squares the magnitude
    # response. Widen the design band in the prewarped (tan) domain so the
    # -3 dB points of the two-pass response land exactly on lo/hi.
    shrink = (math.sqrt(2.0) - 1.0) ** (1.0 / (2.0 * order))
    w_lo = math.tan(math.pi * lo_hz / fs)
    w_hi = math.tan(math.pi * hi_hz / fs)
    w_centre_sq = w_lo * w_hi
    width = (w_hi - w_lo) / shrink
    w_hi_design = 0.5 * (width + math.sqrt(width * width + 4.0 * w_centre_sq))
    w_lo_design = w_centre_sq / w_hi_design
    edges = [
        math.atan(w_lo_design) * fs / math.pi,
        math.atan(w_hi_design) * fs / math.pi,
    ]
    return signal.butter(order, edges, btype="bandpass", output="sos", fs=fs)


def bandpass_array(
    data: np.ndarray,
    fs: float,
    lo_hz: float = DEFAULT_BAND_HZ[0],
    hi_hz: float = DEFAULT_BAND_HZ[1],
    order: int = DEFAULT_FILTER_ORDER,
) -> np.ndarray:
    """Zero-phase band-pass of one channel."""
    sos = _design_bandpass(fs, lo_hz, hi_hz, order)
    return signal.sosfiltfilt(sos, np.asarray(data, dtype=float))


def bandpass(
    record: EmgRecord,
    lo_hz: float = DEFAULT_BAND_HZ[0],
    hi_hz: float = DEFAULT_BAND_HZ[1],
    order: int = DEFAULT_FILTER_ORDER,
) -> EmgRecord:
    """Band-pass every channel of a record, zero phase, same length out."""
    sos = _design_bandpass(record.sample_rate_hz, lo_hz, hi_hz, order)
    filtered = {name: signal.sosfiltfilt(sos, data) for name, data in record.channels.items()}
    return EmgRecord(record.sample_rate_hz, filtered, dict(record.roles))


def rms_envelope_array(data: np.ndarray, fs: float, window_s: float = DEFAULT_WINDOW_S) -> np.ndarray:
    """Centred moving-RMS envelope, window truncated at the record edges.

    The window covers round(window_s * fs) samples, half-open
    [i - w//2, i + (w - w//2)) clipped to the record, so the output has the
    same length as the input and edge values average over what is there.
    """
    x = np.asarray(data, dtype=float)
    if window_s <= 0:
        raise ConfigurationError(f"window must be positive, got {window_s}")
    w = max(1, int(round(window_s * fs)))
    n = x.shape[0]
    left = w // 2
    right = w - left
    csum = np.concatenate(([0.0], np.cumsum(x * x)))
    idx = np.arange(n)
    a = np.clip(idx - left, 0, n)
    b = np.clip(idx + right, 0, n)
    return np.sqrt((csum[b] - csum[a]) / (b - a))


def rms_envelope(record: EmgRecord, window_s: float = DEFAULT_WINDOW_S) -> EmgRecord:
    env = {
        name: rms_envelope_array(data, record.sample_rate_hz, window_s)
        for name, data in record.channels.items()
    }
    return EmgRecord(record.sample_rate_hz, env, dict(record.roles))


def channel_load(envelope: np.ndarray) -> float:
    """Scalar load of one channel: the median of its envelope."""
    return float(np.median(np.asarray(envelope, dtype=float)))


@dataclass(frozen=True)
class LoadEstimate:
    """Muscle-group loads: left plus right channel medians."""

    legs: float
    abdomen: float


def estimate_load(
    record: EmgRecord,
    band_hz: tuple[float, float] = DEFAULT_BAND_HZ,
    order: int = DEFAULT_FILTER_ORDER,
    window_s: float = DEFAULT_WINDOW_S,
) -> LoadEstimate:
    """Full chain for one recording: filter, envelope, median, group sums."""
    env = rms_envelope(bandpass(record, band_hz[0], band_hz[1], order), window_s)
    groups: dict[str, dict[str, float]] = {}
    for name, data in env.channels.items():
        role = env.roles.get(name)
        if role is None:
            continue
        muscle, side = role
        group = MUSCLE_GROUPS.get(muscle)
        if group is None:
            continue
        groups.setdefault(group, {})[side] = channel_load(data)
    for group_name in ("legs", "abdomen"):
        sides = groups.get(group_name, {})
        missing = [s for s in SIDES if s not in sides]
        if missing:
            raise InputError(
                f"recording lacks {group_name} channel(s) for side(s): {', '.join(missing)}"
            )
    return LoadEstimate(
        legs=sum(groups["legs"].values()),
        abdomen=sum(groups["abdomen"].values()),
    )


RecordOrLoad = Union[EmgRecord, LoadEstimate]


def condition_ratios(
    records: Mapping[str, RecordOrLoad],
    band_hz: tuple[float, float] = DEFAULT_BAND_HZ,
    order: int = DEFAULT_FILTER_ORDER,
    window_s: float = DEFAULT_WINDOW_S,
) -> dict:
    """One subject's report: per-condition loads and the four ratios.

    ``records`` maps condition ids (A-D) to recordings (the chain is applied)
    or to precomputed LoadEstimates. Missing conditions and zero denominators
    are reported by name.
    """
    loads: dict[str, LoadEstimate] = {}
    for cond in CONDITIONS:
        if cond not in records:
            raise InputError(f"condition {cond} missing from the recording set")
        entry = records[cond]
        loads[cond] = entry if isinstance(entry, LoadEstimate) else estimate_load(
            entry, band_hz, order, window_s
        )
    ratios: dict[str, dict[str, float]] = {}
    for key in RATIO_KEYS:
        num, den = key.split("/")
        per_group = {}
        for group in ("legs", "abdomen"):
            d = getattr(loads[den], group)
            if d == 0.0:
                raise InputError(f"condition {den} has zero {group} load; ratio {key} undefined")
            per_group[group] = getattr(loads[num], group) / d
        ratios[key] = per_group
    return {
        "loads": {c: {"legs": l.legs, "abdomen": l.abdomen} for c, l in loads.items()},
        "ratios": ratios,
    }


def median_ratios(reports: list[dict]) -> dict[str, dict[str, float]]:
    """Across-subject medians of each ratio, per muscle group."""
    if not reports:
        raise InputError("no subject reports to aggregate")
    out: dict[str, dict[str, float]] = {}
    for key in RATIO_KEYS:
        out[key] = {
            group: float(np.median([r["ratios"][key][group] for r in reports]))
            for group in ("legs", "abdomen")
        }
    return out


# ---------------------------------------------------------------------------
# CSV + sidecar IO

def load_channel_map(path: str | Path) -> dict[str, tuple[str, str]]:
    """Sidecar JSON: column name -> {"muscle": ..., "side": "left"|"right"}."""
    with open(path, encoding="utf-8") as fh:
        raw = json.load(fh)
    if not isinstance(raw, dict):
        raise InputError(f"{path}: channel map must be a JSON object")
    roles = {}
    for name, entry in raw.items():
        if not isinstance(entry, dict) or "muscle" not in entry or "side" not in entry:
            raise InputError(f"{path}: channel {name!r} needs muscle and side")
        roles[name] = (str(entry["muscle"]), str(entry["side"]))
    return roles


def load_recording(
    path: str | Path,
    channel_map: Mapping[str, tuple[str, str]] | str | Path | None = None,
) -> EmgRecord:
    """Read an EMG CSV: header ``t,<channel>,...``, seconds and millivolts.

    The sample rate is inferred from the time column, which must be uniform.
    """
    import csv as _csv

    with open(path, newline="", encoding="utf-8") as fh:
        reader = _csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise InputError(f"{path}: empty file") from None
        if len(header) < 2 or header[0] != "t":
            raise InputError(f"{path}: expected header t,<channel>,..., got {','.join(header)!r}")
        names = header[1:]
        if len(set(names)) != len(names):
            raise InputError(f"{path}: duplicate channel names")
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(header):
                raise InputError(f"{path}:{lineno}: expected {len(header)} columns")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                raise InputError(f"{path}:{lineno}: non-numeric value") from None
    if len(rows) < 2:
        raise InputError(f"{path}: need at least two samples")
    data = np.asarray(rows, dtype=float)
    t = data[:, 0]
    dt = np.diff(t)
    mean_dt = float(np.mean(dt))
    if mean_dt <= 0 or np.max(np.abs(dt - mean_dt)) > 1e-6 * mean_dt + 1e-12:
        raise InputError(f"{path}: time column is not uniformly sampled")
    fs = (t.shape[0] - 1) / float(t[-1] - t[0])
    roles = None
    if channel_map is not None:
        roles = channel_map if isinstance(channel_map, Mapping) else load_channel_map(channel_map)
        roles = dict(roles)
    return EmgRecord(
        sample_rate_hz=fs,
        channels={name: data[:, i + 1] for i, name in enumerate(names)},
        roles=roles,
    )


def report_json(report: dict) -> bytes:
    """Canonical JSON bytes for a report (stable key order, LF ending)."""
    return (json.dumps(report, sort_keys=True, indent=2) + "\n").encode("utf-8")


def report_text(report: dict) -> str:
    """Small fixed-width table of loads and ratios for terminal use."""
    lines = ["condition   legs        abdomen"]
    for cond in sorted(report["loads"]):
        row = report["loads"][cond]
        lines.append(f"{cond:<10}  {row['legs']:<10.6g}  {row['abdomen']:<10.6g}")
    lines.append("")
    lines.append("ratio       legs        abdomen")
    for key in RATIO_KEYS:
        row = report["ratios"][key]
        lines.append(f"{key:<10}  {row['legs']:<10.6g}  {row['abdomen']:<10.6g}")
    return "\n".join(lines) + "\n"
