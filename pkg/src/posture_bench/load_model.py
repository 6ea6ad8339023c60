"""Muscle-load surrogate and the roll split optimiser.

Group loads grow quadratically with the two roll components, lateral bending
steeper on the legs and thoracic rotation steeper on the abdomen by choice of
coefficients; the pendulum base scales everything down by a constant factor.
The quadratics take radians, so the default unit coefficients stay O(1) over
the working range.

The optimiser picks the lateral/thoracic split of a requested roll on the
constraint line lateral + thoracic = roll by golden-section search; the
objective is convex there, and exact ties go to the smaller lateral angle.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .errors import ConfigurationError, RangeError
from .kinematics import MechanismConfig, default_mechanism_config

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0
_SEARCH_TOL_DEG = 1e-9
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class LoadParams:
    """Coefficients of the two quadratic group loads.

    k0_* are the baseline loads at zero roll, a_*/b_* the lateral/thoracic
    curvatures (per radian squared), c_* the pendulum relief factors.
    """

    k0_leg: float = 1.0
    a_leg: float = 1.0
    b_leg: float = 1.0
    c_leg: float = 0.78
    k0_abd: float = 1.0
    a_abd: float = 1.0
    b_abd: float = 1.0
    c_abd: float = 0.75

    def __post_init__(self):
        for name in ("k0_leg", "k0_abd"):
            if getattr(self, name) <= 0:
                raise ConfigurationError(f"{name} must be positive")
        for name in ("a_leg", "b_leg", "a_abd", "b_abd"):
            if getattr(self, name) < 0:
                raise ConfigurationError(f"{name} must be non-negative")
        for name in ("c_leg", "c_abd"):
            if not 0.0 < getattr(self, name) <= 1.0:
                raise ConfigurationError(f"{name} must be in (0, 1]")


@dataclass(frozen=True)
class SplitWeights:
    """Relative importance of the two groups in the split objective."""

    w_leg: float = 1.0
    w_abd: float = 1.0

    def __post_init__(self):
        if self.w_leg < 0 or self.w_abd < 0:
            raise ConfigurationError("weights must be non-negative")
        if self.w_leg == 0 and self.w_abd == 0:
            raise ConfigurationError("at least one weight must be positive")


@dataclass(frozen=True)
class PredictedLoad:
    legs: float
    abdomen: float


@dataclass(frozen=True)
class SplitResult:
    lateral_deg: float
    thoracic_deg: float
    load: PredictedLoad
    objective: float


def predict_load(
    lateral_deg: float,
    thoracic_deg: float,
    pendulum: bool,
    params: LoadParams | None = None,
    config: MechanismConfig | None = None,
) -> PredictedLoad:
    """Group loads for one roll split; angles must respect the axis limits."""
    params = params or LoadParams()
    config = config or default_mechanism_config()
    for name, value, (lo, hi) in (
        ("lateral", lateral_deg, config.lateral_limits_deg),
        ("thoracic", thoracic_deg, config.thoracic_limits_deg),
    ):
        if not lo <= value <= hi:
            raise RangeError(f"{name} {value:.4f} deg outside [{lo:.1f}, {hi:.1f}] deg")
    lat = math.radians(lateral_deg)
    thor = math.radians(thoracic_deg)
    legs = params.k0_leg + params.a_leg * lat * lat + params.b_leg * thor * thor
    abd = params.k0_abd + params.a_abd * lat * lat + params.b_abd * thor * thor
    if pendulum:
        legs *= params.c_leg
        abd *= params.c_abd
    return PredictedLoad(legs=legs, abdomen=abd)


def golden_section_min(f, lo: float, hi: float, tol: float = _SEARCH_TOL_DEG) -> float:
    """Argmin of a unimodal function on [lo, hi] to within tol."""
    if hi - lo <= tol:
        return 0.5 * (lo + hi)
    n_iter = math.ceil(math.log(tol / (hi - lo)) / math.log(_INV_PHI))
    x1 = hi - _INV_PHI * (hi - lo)
    x2 = lo + _INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(n_iter):
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INV_PHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INV_PHI * (hi - lo)
            f2 = f(x2)
    return 0.5 * (lo + hi)


def split_objective(
    lateral_deg: float,
    roll_deg: float,
    pendulum: bool,
    params: LoadParams,
    weights: SplitWeights,
    config: MechanismConfig,
) -> float:
    load = predict_load(lateral_deg, roll_deg - lateral_deg, pendulum, params, config)
    return weights.w_leg * load.legs + weights.w_abd * load.abdomen


def split_optimize(
    roll_deg: float,
    pendulum: bool = True,
    params: LoadParams | None = None,
    weights: SplitWeights | None = None,
    config: MechanismConfig | None = None,
) -> SplitResult:
    """Best lateral/thoracic split of a roll target.

    Searches the feasible segment of the constraint line with golden-section,
    then compares the candidate against both segment ends so an exactly flat
    objective resolves to the smallest lateral angle.
    """
    params = params or LoadParams()
    weights = weights or SplitWeights()
    config = config or default_mechanism_config()
    r_lo, r_hi = config.roll_limits_deg
    if not r_lo <= roll_deg <= r_hi:
        raise RangeError(f"roll {roll_deg:.4f} deg outside [{r_lo:.1f}, {r_hi:.1f}] deg")
    lat_lo, lat_hi = config.lateral_limits_deg
    thor_lo, thor_hi = config.thoracic_limits_deg
    lo = max(lat_lo, roll_deg - thor_hi)
    hi = min(lat_hi, roll_deg - thor_lo)
    if lo > hi:
        raise RangeError(
            f"roll {roll_deg:.4f} deg cannot be split within lateral "
            f"[{lat_lo:.1f}, {lat_hi:.1f}] and thoracic [{thor_lo:.1f}, {thor_hi:.1f}] deg"
        )

    def f(lat: float) -> float:
        return split_objective(lat, roll_deg, pendulum, params, weights, config)

    inner = golden_section_min(f, lo, hi)
    candidates = sorted({lo, inner, hi})
    best_lat = candidates[0]
    best_f = f(best_lat)
    for cand in candidates[1:]:
        fc = f(cand)
        if fc < best_f - _TIE_EPS * max(1.0, abs(best_f)):
            best_lat, best_f = cand, fc
    load = predict_load(best_lat, roll_deg - best_lat, pendulum, params, config)
    return SplitResult(
        lateral_deg=best_lat,
        thoracic_deg=roll_deg - best_lat,
        load=load,
        objective=best_f,
    )
