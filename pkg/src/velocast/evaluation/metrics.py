"""Positional error metrics: per-horizon AEE curves and the ASAEE scalar."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from ..core.horizons import HorizonSet
from ..core.sample import MotionState, Sample
from ..core.trajectory import ForecastResult

BUCKET_ORDER = ("all", "wait_complement", "wait", "straight", "start", "stop",
                "left", "right")


def forecast_array(forecasts: Sequence[ForecastResult] | np.ndarray) -> np.ndarray:
    if isinstance(forecasts, np.ndarray):
        return forecasts
    return np.stack([f.positions for f in forecasts])


def euclidean_errors(samples: Sequence[Sample],
                     forecasts: Sequence[ForecastResult] | np.ndarray) -> np.ndarray:
    """(N, |H|) Euclidean distance between ground truth and forecast."""
    if len(samples) == 0:
        raise ValueError("empty sample set")
    gt = np.stack([s.future_gt.positions for s in samples])
    pred = forecast_array(forecasts)
    if pred.shape != gt.shape:
        raise ValueError(f"forecast shape {pred.shape} != ground truth {gt.shape}")
    return np.linalg.norm(gt - pred, axis=-1)


def aee(samples: Sequence[Sample],
        forecasts: Sequence[ForecastResult] | np.ndarray) -> np.ndarray:
    """Average Euclidean error at every forecast horizon."""
    return euclidean_errors(samples, forecasts).mean(axis=0)


def asaee_from_curve(curve: np.ndarray, horizons: HorizonSet) -> float:
    """Mean over horizons of the per-horizon error divided by its horizon (m/s)."""
    if curve.shape != (len(horizons),):
        raise ValueError("curve length does not match the horizon set")
    return float(np.mean(curve / horizons.seconds))


def asaee(samples: Sequence[Sample],
          forecasts: Sequence[ForecastResult] | np.ndarray) -> float:
    return asaee_from_curve(aee(samples, forecasts), samples[0].future_gt.horizons)


def split_by_motion(samples: Sequence[Sample]) -> dict[str, np.ndarray]:
    """Index buckets per motion state plus 'all' and 'wait_complement'."""
    for i, s in enumerate(samples):
        if not isinstance(s.motion_state, MotionState):
            raise ValueError(f"sample {i} has no motion-state label")
    states = np.array([s.motion_state.value for s in samples])
    buckets = {"all": np.arange(len(samples)),
               "wait_complement": np.nonzero(states != "wait")[0]}
    for state in MotionState:
        buckets[state.value] = np.nonzero(states == state.value)[0]
    return buckets


@dataclass
class EvalReport:
    """Per-horizon AEE, the ASAEE scalar, and per-motion-state breakdown."""

    horizons: HorizonSet
    aee_curve: np.ndarray
    asaee: float
    per_state: dict[str, float] = field(default_factory=dict)
    n_samples: dict[str, int] = field(default_factory=dict)


def build_report(samples: Sequence[Sample],
                 forecasts: Sequence[ForecastResult] | np.ndarray) -> EvalReport:
    horizons = samples[0].future_gt.horizons
    errors = euclidean_errors(samples, forecasts)
    curve = errors.mean(axis=0)
    buckets = split_by_motion(samples)
    per_state = {}
    n_samples = {}
    for name, idx in buckets.items():
        n_samples[name] = int(idx.size)
        if idx.size:
            per_state[name] = asaee_from_curve(errors[idx].mean(axis=0), horizons)
        else:
            per_state[name] = float("nan")
    return EvalReport(horizons=horizons, aee_curve=curve,
                      asaee=asaee_from_curve(curve, horizons),
                      per_state=per_state, n_samples=n_samples)
