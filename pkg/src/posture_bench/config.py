"""Bench configuration: one JSON document covering mechanism geometry, load
coefficients, split weights, the view catalogue, and session timing.

Any subset of the document may be given; missing parts fall back to the
built-in defaults. The CLI resolves the path from --config or the
POSTURE_BENCH_CONFIG environment variable.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping

from .errors import ConfigurationError
from .kinematics import (
    AXES,
    ArcLink,
    AxisConfig,
    CrankLink,
    MechanismConfig,
    default_mechanism_config,
)
from .load_model import LoadParams, SplitWeights
from .planner import ViewCatalog, ViewRegion

ENV_VAR = "POSTURE_BENCH_CONFIG"


@dataclass(frozen=True)
class SessionConfig:
    tick_hz: float = 100.0
    stream_hz: float = 20.0
    pendulum: bool = True

    def __post_init__(self):
        if self.tick_hz <= 0 or self.stream_hz <= 0:
            raise ConfigurationError("tick and stream rates must be positive")
        if self.stream_hz > self.tick_hz:
            raise ConfigurationError("stream rate cannot exceed the tick rate")


@dataclass(frozen=True)
class BenchConfig:
    mechanism: MechanismConfig = field(default_factory=default_mechanism_config)
    load: LoadParams = field(default_factory=LoadParams)
    weights: SplitWeights = field(default_factory=SplitWeights)
    pitch_weight: float = 0.0
    views: ViewCatalog = field(default_factory=ViewCatalog)
    session: SessionConfig = field(default_factory=SessionConfig)


def _pair(raw, what: str) -> tuple[float, float]:
    if not isinstance(raw, (list, tuple)) or len(raw) != 2:
        raise ConfigurationError(f"{what} must be a two-element [lo, hi] list")
    return (float(raw[0]), float(raw[1]))


def _link_from_dict(raw: Mapping, axis: str):
    kind = raw.get("type")
    if kind == "crank":
        return CrankLink(
            lever_mm=float(raw["lever_mm"]),
            base_mm=float(raw["base_mm"]),
            home_gap_mm=float(raw["home_gap_mm"]),
        )
    if kind == "arc":
        return ArcLink(radius_mm=float(raw["radius_mm"]))
    raise ConfigurationError(f"axis {axis!r}: link type must be 'crank' or 'arc', got {kind!r}")


def _link_to_dict(link) -> dict:
    if isinstance(link, CrankLink):
        return {
            "type": "crank",
            "lever_mm": link.lever_mm,
            "base_mm": link.base_mm,
            "home_gap_mm": link.home_gap_mm,
        }
    return {"type": "arc", "radius_mm": link.radius_mm}


def mechanism_from_dict(raw: Mapping) -> MechanismConfig:
    base = default_mechanism_config()
    axes = dict(base.axes)
    for axis, entry in raw.get("axes", {}).items():
        if axis not in AXES:
            raise ConfigurationError(f"unknown axis {axis!r} in config")
        cur = axes[axis]
        axes[axis] = AxisConfig(
            screw_lead_mm=float(entry.get("screw_lead_mm", cur.screw_lead_mm)),
            steps_per_rev=int(entry.get("steps_per_rev", cur.steps_per_rev)),
            stroke_mm=float(entry.get("stroke_mm", cur.stroke_mm)),
            v_max_mm_s=float(entry.get("v_max_mm_s", cur.v_max_mm_s)),
            max_step_rate=float(entry.get("max_step_rate", cur.max_step_rate)),
            link=_link_from_dict(entry["link"], axis) if "link" in entry else cur.link,
        )
    kwargs = {}
    for key in (
        "pitch_limits_deg",
        "roll_limits_deg",
        "lateral_limits_deg",
        "thoracic_limits_deg",
        "passive_height_range_mm",
    ):
        if key in raw:
            kwargs[key] = _pair(raw[key], key)
        else:
            kwargs[key] = getattr(base, key)
    return MechanismConfig(
        axes=axes,
        trunk_axis_offset_mm=float(raw.get("trunk_axis_offset_mm", base.trunk_axis_offset_mm)),
        **kwargs,
    )


def mechanism_to_dict(mech: MechanismConfig) -> dict:
    return {
        "axes": {
            axis: {
                "screw_lead_mm": ax.screw_lead_mm,
                "steps_per_rev": ax.steps_per_rev,
                "stroke_mm": ax.stroke_mm,
                "v_max_mm_s": ax.v_max_mm_s,
                "max_step_rate": ax.max_step_rate,
                "link": _link_to_dict(ax.link),
            }
            for axis, ax in mech.axes.items()
        },
        "pitch_limits_deg": list(mech.pitch_limits_deg),
        "roll_limits_deg": list(mech.roll_limits_deg),
        "lateral_limits_deg": list(mech.lateral_limits_deg),
        "thoracic_limits_deg": list(mech.thoracic_limits_deg),
        "trunk_axis_offset_mm": mech.trunk_axis_offset_mm,
        "passive_height_range_mm": list(mech.passive_height_range_mm),
    }


def _region_from_dict(raw: Mapping, what: str) -> ViewRegion:
    if "roll_deg" not in raw or "pitch_deg" not in raw:
        raise ConfigurationError(f"{what} needs roll_deg and pitch_deg intervals")
    return ViewRegion(
        roll_deg=_pair(raw["roll_deg"], f"{what} roll_deg"),
        pitch_deg=_pair(raw["pitch_deg"], f"{what} pitch_deg"),
    )


def bench_config_from_dict(raw: Mapping) -> BenchConfig:
    mech = mechanism_from_dict(raw.get("mechanism", {}))
    load_raw = raw.get("load", {})
    load = LoadParams(**{k: float(v) for k, v in load_raw.items()})
    weights_raw = dict(raw.get("weights", {}))
    pitch_weight = float(weights_raw.pop("pitch_weight", 0.0))
    weights = SplitWeights(**{k: float(v) for k, v in weights_raw.items()})
    views = dict(ViewCatalog().views)
    for name, entry in raw.get("views", {}).items():
        views[name] = _region_from_dict(entry, f"view {name!r}")
    subject_views = {
        subject: {
            name: _region_from_dict(entry, f"subject {subject!r} view {name!r}")
            for name, entry in per_view.items()
        }
        for subject, per_view in raw.get("subject_views", {}).items()
    }
    session_raw = raw.get("session", {})
    session = SessionConfig(
        tick_hz=float(session_raw.get("tick_hz", 100.0)),
        stream_hz=float(session_raw.get("stream_hz", 20.0)),
        pendulum=bool(session_raw.get("pendulum", True)),
    )
    return BenchConfig(
        mechanism=mech,
        load=load,
        weights=weights,
        pitch_weight=pitch_weight,
        views=ViewCatalog(views=views, subject_views=subject_views),
        session=session,
    )


def bench_config_to_dict(cfg: BenchConfig) -> dict:
    return {
        "mechanism": mechanism_to_dict(cfg.mechanism),
        "load": {
            "k0_leg": cfg.load.k0_leg, "a_leg": cfg.load.a_leg,
            "b_leg": cfg.load.b_leg, "c_leg": cfg.load.c_leg,
            "k0_abd": cfg.load.k0_abd, "a_abd": cfg.load.a_abd,
            "b_abd": cfg.load.b_abd, "c_abd": cfg.load.c_abd,
        },
        "weights": {
            "w_leg": cfg.weights.w_leg,
            "w_abd": cfg.weights.w_abd,
            "pitch_weight": cfg.pitch_weight,
        },
        "views": {
            name: {"roll_deg": list(r.roll_deg), "pitch_deg": list(r.pitch_deg)}
            for name, r in cfg.views.views.items()
        },
        "subject_views": {
            subject: {
                name: {"roll_deg": list(r.roll_deg), "pitch_deg": list(r.pitch_deg)}
                for name, r in per_view.items()
            }
            for subject, per_view in cfg.views.subject_views.items()
        },
        "session": {
            "tick_hz": cfg.session.tick_hz,
            "stream_hz": cfg.session.stream_hz,
            "pendulum": cfg.session.pendulum,
        },
    }


def load_bench_config(path: str | Path | None = None) -> BenchConfig:
    """Config from an explicit path, else $POSTURE_BENCH_CONFIG, else defaults."""
    if path is None:
        path = os.environ.get(ENV_VAR) or None
    if path is None:
        return BenchConfig()
    with open(path, encoding="utf-8") as fh:
        try:
            raw = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ConfigurationError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise ConfigurationError(f"{path}: config root must be a JSON object")
    return bench_config_from_dict(raw)
