"""Posture planning against the scan-view catalogue.

Each echo view is workable inside an axis-aligned box of (roll, pitch)
angles. Planning intersects the boxes of the requested views (optionally
swapped out per subject), then searches the intersection for the posture
with the lowest weighted predicted load: a 0.5 deg grid pass followed by a
golden-section polish per coordinate. The load model only depends on roll,
so pitch enters the objective through a separate weight that defaults to
zero; ties fall to the smaller roll, then the smaller pitch.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .errors import InputError, PlanningError
from .kinematics import MechanismConfig, default_mechanism_config
from .load_model import (
    LoadParams,
    PredictedLoad,
    SplitResult,
    SplitWeights,
    golden_section_min,
    split_optimize,
)
from .posture import PostureAngles

GRID_STEP_DEG = 0.5
_TIE_EPS = 1e-12

PARASTERNAL_LONG_AXIS = "parasternal_long_axis"
APICAL_FOUR_CHAMBER = "apical_four_chamber"

VIEW_ALIASES = {
    "plax": PARASTERNAL_LONG_AXIS,
    "a4c": APICAL_FOUR_CHAMBER,
}


@dataclass(frozen=True)
class ViewRegion:
    """Workable (roll, pitch) box for one view, degrees."""

    roll_deg: tuple[float, float]
    pitch_deg: tuple[float, float]

    def __post_init__(self):
        for name, (lo, hi) in (("roll", self.roll_deg), ("pitch", self.pitch_deg)):
            if lo > hi:
                raise InputError(f"view region {name} interval is reversed: [{lo}, {hi}]")

    def contains(self, roll: float, pitch: float, tol: float = 1e-9) -> bool:
        return (
            self.roll_deg[0] - tol <= roll <= self.roll_deg[1] + tol
            and self.pitch_deg[0] - tol <= pitch <= self.pitch_deg[1] + tol
        )


DEFAULT_VIEWS: Mapping[str, ViewRegion] = {
    PARASTERNAL_LONG_AXIS: ViewRegion(roll_deg=(10.0, 30.0), pitch_deg=(50.0, 80.0)),
    APICAL_FOUR_CHAMBER: ViewRegion(roll_deg=(10.0, 20.0), pitch_deg=(60.0, 70.0)),
}


@dataclass(frozen=True)
class ViewCatalog:
    """View boxes plus optional per-subject replacements."""

    views: Mapping[str, ViewRegion] = field(default_factory=lambda: dict(DEFAULT_VIEWS))
    subject_views: Mapping[str, Mapping[str, ViewRegion]] = field(default_factory=dict)

    def region(self, view: str, subject: str | None = None) -> ViewRegion:
        key = resolve_view(view, self)
        if subject is not None:
            override = self.subject_views.get(subject, {})
            if key in override:
                return override[key]
        return self.views[key]


def resolve_view(name: str, catalog: ViewCatalog | None = None) -> str:
    views = (catalog or ViewCatalog()).views
    key = name.strip().lower()
    key = VIEW_ALIASES.get(key, key)
    if key not in views:
        known = ", ".join(sorted(set(views) | set(VIEW_ALIASES)))
        raise InputError(f"unknown view {name!r}; known views: {known}")
    return key


def feasible_region(
    views: Iterable[str],
    catalog: ViewCatalog | None = None,
    subject: str | None = None,
) -> ViewRegion | None:
    """Box intersection of the requested views; None when they do not overlap."""
    catalog = catalog or ViewCatalog()
    names = list(views)
    if not names:
        raise InputError("at least one view is required")
    boxes = [catalog.region(v, subject) for v in names]
    roll_lo = max(b.roll_deg[0] for b in boxes)
    roll_hi = min(b.roll_deg[1] for b in boxes)
    pitch_lo = max(b.pitch_deg[0] for b in boxes)
    pitch_hi = min(b.pitch_deg[1] for b in boxes)
    if roll_lo > roll_hi or pitch_lo > pitch_hi:
        return None
    return ViewRegion(roll_deg=(roll_lo, roll_hi), pitch_deg=(pitch_lo, pitch_hi))


@dataclass(frozen=True)
class PlanResult:
    views: tuple[str, ...]
    region: ViewRegion
    posture: PostureAngles
    split: SplitResult
    load: PredictedLoad
    objective: float


def _grid(lo: float, hi: float, step: float) -> list[float]:
    values = []
    k = 0
    while True:
        v = lo + k * step
        if v >= hi - 1e-12:
            break
        values.append(v)
        k += 1
    values.append(hi)
    return values


def plan_posture(
    views: Iterable[str],
    params: LoadParams | None = None,
    weights: SplitWeights | None = None,
    pendulum: bool = True,
    subject: str | None = None,
    catalog: ViewCatalog | None = None,
    config: MechanismConfig | None = None,
    pitch_weight: float = 0.0,
    grid_step_deg: float = GRID_STEP_DEG,
) -> PlanResult:
    """Lowest-load posture inside the intersection of the requested views."""
    params = params or LoadParams()
    weights = weights or SplitWeights()
    config = config or default_mechanism_config()
    catalog = catalog or ViewCatalog()
    names = tuple(resolve_view(v, catalog) for v in views)
    region = feasible_region(names, catalog, subject)
    if region is None:
        raise PlanningError(
            f"views {', '.join(sorted(set(names)))} share no workable posture; "
            "fall back to a single-view examination"
        )
    # clip to what the mechanism can actually reach
    env = ViewRegion(roll_deg=config.roll_limits_deg, pitch_deg=config.pitch_limits_deg)
    roll_lo = max(region.roll_deg[0], env.roll_deg[0])
    roll_hi = min(region.roll_deg[1], env.roll_deg[1])
    pitch_lo = max(region.pitch_deg[0], env.pitch_deg[0])
    pitch_hi = min(region.pitch_deg[1], env.pitch_deg[1])
    if roll_lo > roll_hi or pitch_lo > pitch_hi:
        raise PlanningError(
            "the requested views only overlap outside the mechanism envelope; "
            "fall back to a single-view examination"
        )

    split_cache: dict[float, SplitResult] = {}

    def split_at(roll: float) -> SplitResult:
        if roll not in split_cache:
            split_cache[roll] = split_optimize(roll, pendulum, params, weights, config)
        return split_cache[roll]

    def f_roll(roll: float) -> float:
        return split_at(roll).objective

    def f_pitch(pitch: float) -> float:
        return pitch_weight * math.radians(pitch) ** 2

    def pick(candidates: Iterable[float], f) -> float:
        ordered = sorted(set(candidates))
        best_x = ordered[0]
        best_f = f(best_x)
        for x in ordered[1:]:
            fx = f(x)
            if fx < best_f - _TIE_EPS * max(1.0, abs(best_f)):
                best_x, best_f = x, fx
        return best_x

    # objective is separable in (roll, pitch), so each axis can be settled
    # on its own: grid pass, then a golden-section polish around the best cell
    best_roll = pick(_grid(roll_lo, roll_hi, grid_step_deg), f_roll)
    best_pitch = pick(_grid(pitch_lo, pitch_hi, grid_step_deg), f_pitch)

    r_lo = max(roll_lo, best_roll - grid_step_deg)
    r_hi = min(roll_hi, best_roll + grid_step_deg)
    best_roll = pick([r_lo, r_hi, best_roll, golden_section_min(f_roll, r_lo, r_hi)], f_roll)
    p_lo = max(pitch_lo, best_pitch - grid_step_deg)
    p_hi = min(pitch_hi, best_pitch + grid_step_deg)
    best_pitch = pick([p_lo, p_hi, best_pitch, golden_section_min(f_pitch, p_lo, p_hi)], f_pitch)

    split = split_at(best_roll)
    return PlanResult(
        views=names,
        region=ViewRegion(roll_deg=(roll_lo, roll_hi), pitch_deg=(pitch_lo, pitch_hi)),
        posture=PostureAngles(roll_deg=best_roll, pitch_deg=best_pitch),
        split=split,
        load=split.load,
        objective=split.objective + f_pitch(best_pitch),
    )


def plan_per_view(views: Iterable[str], **kwargs) -> dict[str, PlanResult]:
    """Independent plan for each requested view (no intersection)."""
    return {
        resolve_view(v, kwargs.get("catalog")): plan_posture([v], **kwargs)
        for v in views
    }
