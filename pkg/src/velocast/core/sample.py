"""Forecasting samples: clips, motion-state labels, and the Sample record."""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .trajectory import ForecastResult, Frame, TrajectoryWindow

DEFAULT_CLIP_LEN = 10
DEFAULT_CLIP_HW = 192


class MotionState(enum.Enum):
    WAIT = "wait"
    START = "start"
    STOP = "stop"
    STRAIGHT = "straight"
    LEFT = "left"
    RIGHT = "right"


TURN_STATES = (MotionState.LEFT, MotionState.RIGHT)


@dataclass(frozen=True)
class VideoClip:
    """T grayscale frames (oldest first) covering the 1 s before t0, values in [0, 1]."""

    camera_id: int
    frames: np.ndarray  # (T, H, W) float32

    def __post_init__(self):
        if self.camera_id not in (1, 2):
            raise ValueError(f"camera_id must be 1 or 2, got {self.camera_id}")
        fr = np.ascontiguousarray(self.frames, dtype=np.float32)
        if fr.ndim != 3:
            raise ValueError(f"frames must be (T, H, W), got shape {fr.shape}")
        fr.setflags(write=False)
        object.__setattr__(self, "frames", fr)

    @property
    def shape(self):
        return self.frames.shape


@dataclass(frozen=True)
class FlowClip:
    """T-1 two-channel flow fields; signed per-pixel displacement in pixels."""

    camera_id: int
    frames: np.ndarray  # (T-1, 2, H, W) float32

    def __post_init__(self):
        if self.camera_id not in (1, 2):
            raise ValueError(f"camera_id must be 1 or 2, got {self.camera_id}")
        fr = np.ascontiguousarray(self.frames, dtype=np.float32)
        if fr.ndim != 4 or fr.shape[1] != 2:
            raise ValueError(f"frames must be (T-1, 2, H, W), got shape {fr.shape}")
        fr.setflags(write=False)
        object.__setattr__(self, "frames", fr)

    @property
    def shape(self):
        return self.frames.shape


@dataclass(frozen=True)
class Sample:
    """One forecasting instance: 1 s ego past, ground-truth future, optional
    per-camera image and flow clips, and a motion-state label at t0."""

    vru_id: str
    t0: float
    past: TrajectoryWindow
    future_gt: ForecastResult
    motion_state: MotionState
    video: Optional[tuple[VideoClip, VideoClip]] = None
    flow: Optional[tuple[FlowClip, FlowClip]] = None
    occluded: tuple[bool, bool] = (False, False)
    anchor_xy: tuple[float, float] = (0.0, 0.0)
    anchor_heading: float = 0.0

    def __post_init__(self):
        if self.past.frame is not Frame.EGO:
            raise ValueError("sample past trajectory must be in the ego frame")
        for clips, kind in ((self.video, VideoClip), (self.flow, FlowClip)):
            if clips is None:
                continue
            if len(clips) != 2 or {c.camera_id for c in clips} != {1, 2}:
                raise ValueError(f"{kind.__name__}s must cover cameras 1 and 2")
        if self.video is not None and self.flow is not None:
            if self.flow[0].frames.shape[0] != self.video[0].frames.shape[0] - 1:
                raise ValueError("flow clips must have one frame fewer than video clips")

    @property
    def has_clips(self) -> bool:
        return self.video is not None and self.flow is not None
