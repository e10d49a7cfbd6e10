"""Trajectory windows, forecast containers, and world<->ego transforms."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .horizons import HorizonSet

# Trailing window used to estimate the heading that defines the ego x-axis.
HEADING_WINDOW_S = 0.2


class Frame(enum.Enum):
    WORLD = "world"
    EGO = "ego"


class DegenerateHeadingError(ValueError):
    """Raised when too little history exists to orient the ego frame."""


@dataclass(frozen=True)
class TrajectoryWindow:
    """Timestamped 2-D positions in one coordinate frame.

    Timestamps are strictly increasing with a constant step; positions are
    an (N, 2) float64 array in meters.
    """

    frame: Frame
    timestamps: np.ndarray
    positions: np.ndarray

    def __post_init__(self):
        ts = np.asarray(self.timestamps, dtype=np.float64)
        ps = np.asarray(self.positions, dtype=np.float64)
        if ts.ndim != 1 or ts.size == 0:
            raise ValueError("timestamps must be a non-empty 1-D array")
        if ps.shape != (ts.size, 2):
            raise ValueError(f"positions must have shape ({ts.size}, 2), got {ps.shape}")
        if ts.size > 1:
            steps = np.diff(ts)
            if np.any(steps <= 0):
                raise ValueError("timestamps must be strictly increasing")
            if not np.allclose(steps, steps[0], rtol=0.0, atol=1e-9):
                raise ValueError("timestamps must be uniformly spaced")
        ts.setflags(write=False)
        ps.setflags(write=False)
        object.__setattr__(self, "timestamps", ts)
        object.__setattr__(self, "positions", ps)

    def __len__(self) -> int:
        return int(self.timestamps.size)

    @property
    def dt(self) -> float:
        if len(self) < 2:
            raise ValueError("dt undefined for a single-point window")
        return float(self.timestamps[1] - self.timestamps[0])

    def index_at(self, t: float) -> int:
        i = int(round((t - self.timestamps[0]) / self.dt)) if len(self) > 1 else 0
        if i < 0 or i >= len(self) or abs(self.timestamps[i] - t) > 1e-6:
            raise KeyError(f"timestamp {t} not contained in window")
        return i


@dataclass(frozen=True)
class ForecastResult:
    """Predicted (or ground-truth) ego-frame positions, one per horizon."""

    horizons: HorizonSet
    positions: np.ndarray

    def __post_init__(self):
        ps = np.asarray(self.positions, dtype=np.float64)
        if ps.shape != (len(self.horizons), 2):
            raise ValueError(
                f"positions must have shape ({len(self.horizons)}, 2), got {ps.shape}"
            )
        ps.setflags(write=False)
        object.__setattr__(self, "positions", ps)


@dataclass(frozen=True)
class AnchorPose:
    """Pose that anchors an ego frame: world position of the origin and the
    world heading (radians) that maps to the ego +x axis."""

    position: np.ndarray
    heading: float

    def __post_init__(self):
        p = np.asarray(self.position, dtype=np.float64)
        if p.shape != (2,):
            raise ValueError("anchor position must be a 2-vector")
        p.setflags(write=False)
        object.__setattr__(self, "position", p)


def ego_anchor(world_traj: TrajectoryWindow, t0: float) -> AnchorPose:
    """Anchor pose at ``t0``: origin at the position there, +x along the mean
    heading of the trailing 0.2 s. Zero net displacement falls back to the
    identity rotation."""
    if world_traj.frame is not Frame.WORLD:
        raise ValueError("ego_anchor expects a world-frame trajectory")
    i0 = world_traj.index_at(t0)
    if i0 < 2:
        raise DegenerateHeadingError(
            f"need at least 2 samples before t0={t0} to estimate heading, have {i0}"
        )
    n_back = max(1, int(round(HEADING_WINDOW_S / world_traj.dt)))
    j = max(0, i0 - n_back)
    # Mean of per-step displacements over the window == net displacement.
    delta = world_traj.positions[i0] - world_traj.positions[j]
    norm = float(np.hypot(delta[0], delta[1]))
    heading = 0.0 if norm < 1e-12 else math.atan2(delta[1], delta[0])
    return AnchorPose(position=world_traj.positions[i0].copy(), heading=heading)


def _rotation(heading: float) -> np.ndarray:
    c, s = math.cos(heading), math.sin(heading)
    return np.array([[c, -s], [s, c]], dtype=np.float64)


def to_ego(world_traj: TrajectoryWindow, t0: float, anchor: AnchorPose | None = None) -> TrajectoryWindow:
    """Rigidly map a world trajectory into the ego frame anchored at ``t0``."""
    if anchor is None:
        anchor = ego_anchor(world_traj, t0)
    rot = _rotation(-anchor.heading)
    ego = (world_traj.positions - anchor.position) @ rot.T
    return TrajectoryWindow(frame=Frame.EGO, timestamps=world_traj.timestamps, positions=ego)


def from_ego(ego_forecast: ForecastResult, anchor: AnchorPose) -> ForecastResult:
    """Map an ego-frame forecast back to world coordinates via the anchor pose."""
    rot = _rotation(anchor.heading)
    world = ego_forecast.positions @ rot.T + anchor.position
    return ForecastResult(horizons=ego_forecast.horizons, positions=world)


def ego_points(points: np.ndarray, anchor: AnchorPose) -> np.ndarray:
    """Map an (N, 2) array of world points into the anchor's ego frame."""
    rot = _rotation(-anchor.heading)
    return (np.asarray(points, dtype=np.float64) - anchor.position) @ rot.T
