"""Threshold-based motion-state labeling for trajectories without ground-truth
labels. Synthetic datasets carry generator labels; this classifier exists for
real recordings and is heuristic by design (thresholds documented below)."""
from __future__ import annotations

import math

import numpy as np

from ..core.sample import MotionState
from ..core.trajectory import TrajectoryWindow

WAIT_SPEED_MS = 0.5        # standing if mean speed over the window is below this
WAIT_WINDOW_S = 0.5
TURN_ANGLE_DEG = 30.0      # cumulative heading change over TURN_WINDOW_S
TURN_WINDOW_S = 2.0
TRANSITION_S = 1.0         # start/stop band around wait<->moving transitions


def label_motion_states(traj: TrajectoryWindow) -> np.ndarray:
    """Per-timestep MotionState labels from positions alone."""
    n = len(traj)
    dt = traj.dt
    pos = traj.positions

    w = max(1, int(round(WAIT_WINDOW_S / dt)))
    speeds = np.zeros(n)
    for i in range(n):
        a = max(0, i - w)
        span = (i - a) * dt
        speeds[i] = np.linalg.norm(pos[i] - pos[a]) / span if span > 0 else 0.0
    standing = speeds < WAIT_SPEED_MS

    steps = np.diff(pos, axis=0)
    moving_step = np.linalg.norm(steps, axis=1) > 1e-9
    headings = np.zeros(n)
    last = 0.0
    for i in range(1, n):
        if moving_step[i - 1]:
            last = math.atan2(steps[i - 1, 1], steps[i - 1, 0])
        headings[i] = last
    headings[0] = headings[1] if n > 1 else 0.0

    tw = max(1, int(round(TURN_WINDOW_S / dt)))
    labels = np.empty(n, dtype=object)
    trans = max(1, int(round(TRANSITION_S / dt)))
    for i in range(n):
        if standing[i]:
            labels[i] = MotionState.WAIT
            continue
        # start/stop: moving samples near a wait<->moving transition
        lo = max(0, i - trans)
        hi = min(n, i + trans + 1)
        if standing[lo:i].any():
            labels[i] = MotionState.START
            continue
        if standing[i + 1:hi].any():
            labels[i] = MotionState.STOP
            continue
        a = max(0, i - tw // 2)
        b = min(n - 1, i + tw // 2)
        sweep = _unwrapped_sweep(headings[a:b + 1])
        if abs(sweep) > math.radians(TURN_ANGLE_DEG):
            labels[i] = MotionState.LEFT if sweep > 0 else MotionState.RIGHT
        else:
            labels[i] = MotionState.STRAIGHT
    return labels


def _unwrapped_sweep(headings: np.ndarray) -> float:
    if headings.size < 2:
        return 0.0
    unwrapped = np.unwrap(headings)
    return float(unwrapped[-1] - unwrapped[0])
