"""Randomized scenario specs and per-scenario camera placement.

The default distribution scripts every scenario as wait -> start -> cruise
with one or two turns -> stop -> wait, and sizes the two wait phases to match
the moving time inside the windowed span, so about half of all extracted
samples are wait samples.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ..core.sample import MotionState
from .camera import CameraModel
from .render import GLYPH_MARGIN_M
from .scenario import ScenarioSpec, ScenarioTrack, Segment

# Window geometry the builder uses; waits are sized against these so the
# leading 1 s past and trailing 2.5 s future fall inside the wait phases.
PAST_S = 1.0
FUTURE_S = 2.5


@dataclass(frozen=True)
class ScenarioDistribution:
    cruise_speed: tuple[float, float] = (1.6, 2.4)
    accel: tuple[float, float] = (1.2, 2.0)
    turn_radius: tuple[float, float] = (3.2, 4.8)
    turn_angle_deg: tuple[float, float] = (75.0, 105.0)
    straight_s: tuple[float, float] = (1.0, 1.8)
    second_turn_prob: float = 0.5
    cue_lead_time: float = 0.8
    noise_std: float = 0.001
    wander_std: float = 0.0
    wander_tau: float = 0.25
    occlusion_rate: tuple[float, float] = (0.0, 0.0)
    occlusion_len_s: tuple[float, float] = (1.0, 2.5)
    wait_split: tuple[float, float] = (0.35, 0.65)

    def sample(self, rng: np.random.Generator, seed: int) -> ScenarioSpec:
        u = rng.uniform
        v = u(*self.cruise_speed)
        a = u(*self.accel)
        radius = u(*self.turn_radius)
        ramp = v / a

        moving: list[Segment] = [Segment(MotionState.START, ramp)]
        moving.append(Segment(MotionState.STRAIGHT, u(*self.straight_s)))
        first = MotionState.LEFT if rng.random() < 0.5 else MotionState.RIGHT
        moving.append(Segment(first, math.radians(u(*self.turn_angle_deg)) * radius / v))
        moving.append(Segment(MotionState.STRAIGHT, u(*self.straight_s)))
        if rng.random() < self.second_turn_prob:
            second = MotionState.LEFT if rng.random() < 0.5 else MotionState.RIGHT
            moving.append(Segment(second, math.radians(u(*self.turn_angle_deg)) * radius / v))
            moving.append(Segment(MotionState.STRAIGHT, u(*self.straight_s)))
        moving.append(Segment(MotionState.STOP, ramp))

        moving_time = sum(s.duration for s in moving)
        alpha = u(*self.wait_split)
        head_wait = Segment(MotionState.WAIT, PAST_S + alpha * moving_time)
        tail_wait = Segment(MotionState.WAIT, FUTURE_S + (1 - alpha) * moving_time)
        script = (head_wait, *moving, tail_wait)

        duration = sum(s.duration for s in script)
        occl = tuple(
            self._occlusion_windows(rng, rate, duration) for rate in self.occlusion_rate
        )
        return ScenarioSpec(
            motion_script=script,
            cruise_speed=v,
            accel=a,
            turn_radius=radius,
            cue_lead_time=self.cue_lead_time,
            noise_std=self.noise_std,
            wander_std=self.wander_std,
            wander_tau=self.wander_tau,
            occlusion=occl,
            start_xy=(0.0, 0.0),
            start_heading=u(0.0, 2.0 * math.pi),
            seed=seed,
        )

    def _occlusion_windows(self, rng: np.random.Generator, rate: float,
                           duration: float) -> tuple[tuple[float, float], ...]:
        if rate <= 0:
            return ()
        windows: list[tuple[float, float]] = []
        covered = 0.0
        for _ in range(64):
            if covered >= rate * duration:
                break
            length = rng.uniform(*self.occlusion_len_s)
            start = rng.uniform(0.0, max(1e-6, duration - length))
            windows.append((start, start + length))
            merged: list[list[float]] = []
            for lo, hi in sorted(windows):
                if merged and lo <= merged[-1][1]:
                    merged[-1][1] = max(merged[-1][1], hi)
                else:
                    merged.append([lo, hi])
            windows = [(lo, hi) for lo, hi in merged]
            covered = sum(hi - lo for lo, hi in windows)
        return tuple(windows)


@dataclass(frozen=True)
class CameraPlacement:
    image_hw: tuple[int, int] = (48, 48)
    min_scale: float = 0.25
    margin_m: float = field(default=GLYPH_MARGIN_M + 1.0)

    def place(self, track: ScenarioTrack, rng: np.random.Generator) -> tuple[CameraModel, CameraModel]:
        """Two cameras centered on the path, viewing directions 90 deg apart;
        the m/px scale grows as needed so the whole path stays in view."""
        lo = track.true_positions.min(axis=0)
        hi = track.true_positions.max(axis=0)
        center = 0.5 * (lo + hi)
        half_extent = float(np.max(hi - center)) + self.margin_m
        scale = max(self.min_scale, 2.0 * half_extent / min(self.image_hw))
        theta = rng.uniform(0.0, 2.0 * math.pi)
        make = lambda cid, ang: CameraModel(
            camera_id=cid, position=(float(center[0]), float(center[1])),
            view_dir=ang, image_hw=self.image_hw, scale_m_per_px=scale)
        return make(1, theta), make(2, theta + math.pi / 2.0)
