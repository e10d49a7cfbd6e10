"""Scripted cyclist kinematics with per-timestep labels and head-cue timeline."""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core.rng import substream
from ..core.sample import MotionState
from ..core.trajectory import Frame, TrajectoryWindow

# The head cue ramps in over this many seconds (capped by the lead time).
CUE_RAMP_S = 0.3


@dataclass(frozen=True)
class Segment:
    state: MotionState
    duration: float

    def __post_init__(self):
        if self.duration <= 0:
            raise ValueError(f"segment duration must be > 0, got {self.duration}")


@dataclass(frozen=True)
class ScenarioSpec:
    """Full description of one synthetic scenario."""

    motion_script: tuple[Segment, ...]
    cruise_speed: float = 2.0      # m/s
    accel: float = 1.5             # m/s^2, start/stop ramps
    turn_radius: float = 4.0       # m
    cue_lead_time: float = 0.8     # s the head cue precedes a turn
    noise_std: float = 0.0         # tracker jitter on measured positions, m
    wander_std: float = 0.0        # true micro-wander (balance/wobble), m
    wander_tau: float = 0.25       # wander correlation time, s
    occlusion: tuple[tuple[tuple[float, float], ...], tuple[tuple[float, float], ...]] = ((), ())
    start_xy: tuple[float, float] = (0.0, 0.0)
    start_heading: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if not self.motion_script:
            raise ValueError("motion_script must contain at least one segment")
        if self.cruise_speed <= 0 or self.accel <= 0 or self.turn_radius <= 0:
            raise ValueError("cruise_speed, accel, and turn_radius must be > 0")
        if self.cue_lead_time < 0 or self.noise_std < 0:
            raise ValueError("cue_lead_time and noise_std must be >= 0")
        if self.wander_std < 0 or self.wander_tau <= 0:
            raise ValueError("wander_std must be >= 0 and wander_tau > 0")

    @property
    def duration(self) -> float:
        return sum(s.duration for s in self.motion_script)


@dataclass(frozen=True)
class ScenarioTrack:
    """Generated scenario: tracker-like noisy positions plus the clean
    kinematic state. Cameras observe the true world, so rendering and flow
    use ``true_positions``; trajectory windows use the jittered ``positions``.
    """

    timestamps: np.ndarray       # (N,)
    positions: np.ndarray        # (N, 2) jittered positions, m
    true_positions: np.ndarray   # (N, 2) noise-free positions, m
    headings: np.ndarray         # (N,) rad
    speeds: np.ndarray           # (N,) m/s
    labels: np.ndarray           # (N,) MotionState objects
    cue: np.ndarray              # (N,) signed cue in [-1, 1]; +1 = left
    spec: ScenarioSpec = field(repr=False, default=None)

    def __len__(self) -> int:
        return int(self.timestamps.size)

    @property
    def dt(self) -> float:
        return float(self.timestamps[1] - self.timestamps[0])

    def index_at(self, t: float) -> int:
        i = int(round((t - self.timestamps[0]) / self.dt))
        if i < 0 or i >= len(self) or abs(self.timestamps[i] - t) > 1e-6:
            raise KeyError(f"time {t} outside track")
        return i

    def window(self, t0: float, n_points: int) -> TrajectoryWindow:
        """World-frame window of the last ``n_points`` samples ending at t0."""
        i0 = self.index_at(t0)
        if i0 - n_points + 1 < 0:
            raise ValueError("window extends before track start")
        sl = slice(i0 - n_points + 1, i0 + 1)
        return TrajectoryWindow(frame=Frame.WORLD, timestamps=self.timestamps[sl],
                                positions=self.positions[sl])


def _arc_step(pos, heading, v, signed_radius, dt):
    new_heading = heading + (v / signed_radius) * dt
    dx = signed_radius * (math.sin(new_heading) - math.sin(heading))
    dy = signed_radius * (math.cos(heading) - math.cos(new_heading))
    return pos + np.array([dx, dy]), new_heading


def generate_trajectory(spec: ScenarioSpec, rate_hz: float = 50.0) -> ScenarioTrack:
    """Integrate the motion script at ``rate_hz``.

    wait holds position, start/stop ramp speed linearly at ``accel``, straight
    moves at cruise speed, and left/right follow a constant-speed circular arc
    of ``turn_radius`` (left turns increase the heading). Labels come from the
    generating segment; jitter is added to positions afterwards.
    """
    dt = 1.0 / rate_hz
    n = int(round(spec.duration * rate_hz)) + 1
    timestamps = np.arange(n) * dt

    # Segment index for each step interval [t_i, t_i + dt).
    bounds = np.cumsum([s.duration for s in spec.motion_script])
    seg_of = np.minimum(np.searchsorted(bounds, timestamps + 1e-9, side="right"),
                        len(spec.motion_script) - 1)

    positions = np.zeros((n, 2))
    headings = np.zeros(n)
    speeds = np.zeros(n)
    pos = np.array(spec.start_xy, dtype=np.float64)
    heading = float(spec.start_heading)
    v = 0.0

    positions[0] = pos
    headings[0] = heading
    for i in range(n - 1):
        kind = spec.motion_script[seg_of[i]].state
        if kind is MotionState.WAIT:
            v = 0.0
        elif kind is MotionState.START:
            v_next = min(spec.cruise_speed, v + spec.accel * dt)
            pos = pos + 0.5 * (v + v_next) * dt * np.array([math.cos(heading), math.sin(heading)])
            v = v_next
        elif kind is MotionState.STOP:
            v_next = max(0.0, v - spec.accel * dt)
            pos = pos + 0.5 * (v + v_next) * dt * np.array([math.cos(heading), math.sin(heading)])
            v = v_next
        elif kind is MotionState.STRAIGHT:
            v = spec.cruise_speed
            pos = pos + v * dt * np.array([math.cos(heading), math.sin(heading)])
        else:  # LEFT / RIGHT
            v = v if v > 0 else spec.cruise_speed
            r = spec.turn_radius if kind is MotionState.LEFT else -spec.turn_radius
            pos, heading = _arc_step(pos, heading, v, r, dt)
        positions[i + 1] = pos
        headings[i + 1] = heading
        speeds[i + 1] = v

    labels = np.array([spec.motion_script[k].state for k in seg_of], dtype=object)
    cue = _cue_timeline(spec, timestamps)

    if spec.wander_std > 0:
        positions = positions + _ou_wander(spec, n, dt)
    true_positions = positions
    if spec.noise_std > 0:
        positions = positions + _smooth_jitter(spec, n)

    return ScenarioTrack(timestamps=timestamps, positions=positions,
                         true_positions=true_positions, headings=headings,
                         speeds=speeds, labels=labels, cue=cue, spec=spec)


def _ou_wander(spec: ScenarioSpec, n: int, dt: float) -> np.ndarray:
    """Mean-reverting true position wander: balance shifts while standing,
    lane micro-weave while riding. Part of the real world, so it is seen by
    the cameras and largely unpredictable beyond its correlation time."""
    rng = substream(spec.seed, "wander")
    rho = math.exp(-dt / spec.wander_tau)
    innov = rng.normal(0.0, spec.wander_std * math.sqrt(1.0 - rho * rho), size=(n, 2))
    wander = np.zeros((n, 2))
    wander[0] = rng.normal(0.0, spec.wander_std, size=2)
    for i in range(1, n):
        wander[i] = rho * wander[i - 1] + innov[i]
    return wander


def _smooth_jitter(spec: ScenarioSpec, n: int, window: int = 15) -> np.ndarray:
    """Temporally correlated positional noise with marginal std ``noise_std``.

    Smoothing keeps the apparent step-to-step speed of standing cyclists far
    below the wait threshold while preserving tracker-like wander."""
    rng = substream(spec.seed, "jitter")
    raw = rng.normal(0.0, 1.0, size=(n + 2 * window, 2))
    kernel = np.hanning(window + 2)[1:-1]
    kernel /= kernel.sum()
    sm = np.stack([np.convolve(raw[:, k], kernel, mode="same") for k in range(2)], axis=1)
    sm = sm[window:window + n]
    return spec.noise_std * sm / np.sqrt(np.sum(kernel ** 2))


def _cue_timeline(spec: ScenarioSpec, timestamps: np.ndarray) -> np.ndarray:
    """Signed head-cue per timestep: ramps in during the lead window before a
    turn, holds through the turn, and is zero everywhere else."""
    cue = np.zeros(timestamps.size)
    ramp = min(CUE_RAMP_S, spec.cue_lead_time) if spec.cue_lead_time > 0 else 0.0
    t_start = 0.0
    for seg in spec.motion_script:
        if seg.state in (MotionState.LEFT, MotionState.RIGHT):
            sign = 1.0 if seg.state is MotionState.LEFT else -1.0
            t_end = t_start + seg.duration
            inside = (timestamps >= t_start - 1e-9) & (timestamps < t_end - 1e-9)
            cue[inside] = sign
            if spec.cue_lead_time > 0:
                lead_lo = t_start - spec.cue_lead_time
                pre = (timestamps >= lead_lo - 1e-9) & (timestamps < t_start - 1e-9) & (cue == 0)
                if ramp > 0:
                    level = np.minimum(1.0, (timestamps[pre] - lead_lo) / ramp)
                else:
                    level = 1.0
                cue[pre] = sign * level
        t_start += seg.duration
    return cue
