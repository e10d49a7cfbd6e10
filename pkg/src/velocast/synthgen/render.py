"""Glyph rendering and analytic ground-truth optical flow.

The cyclist is drawn as an oriented body bar plus a head dot; during the cue
window the head dot swings laterally toward the upcoming turn. Flow fields are
exact rigid-motion displacements of the drawn glyph pixels, zero elsewhere.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..core.rng import substream
from ..core.sample import FlowClip, VideoClip
from .camera import CameraModel
from .scenario import ScenarioSpec, ScenarioTrack

BODY_LEN = 3.0        # m, along heading
BODY_WID = 1.0        # m
HEAD_FWD = 1.8        # m ahead of body center
HEAD_RADIUS = 0.6     # m
CUE_LAT = 0.9         # m of lateral head offset at full cue
BODY_INTENSITY = 0.85
HEAD_INTENSITY = 1.0
AA_PX = 1.0           # soft-edge width in pixels
GLYPH_MARGIN_M = HEAD_FWD + HEAD_RADIUS

CLIP_LEN = 10
CLIP_RATE_HZ = 10.0


class OutOfViewError(ValueError):
    """Cyclist leaves the camera's field of view inside the requested window."""


def static_background(camera: CameraModel, seed: int) -> np.ndarray:
    """Deterministic textured background in [0.15, 0.45]: low-res noise
    bilinearly upsampled, so it is smooth but not uniform."""
    rng = substream(seed, f"background/{camera.camera_id}")
    h, w = camera.image_hw
    coarse = rng.uniform(0.0, 1.0, size=(6, 6))
    yi = np.linspace(0, coarse.shape[0] - 1, h)
    xi = np.linspace(0, coarse.shape[1] - 1, w)
    y0 = np.floor(yi).astype(int).clip(0, coarse.shape[0] - 2)
    x0 = np.floor(xi).astype(int).clip(0, coarse.shape[1] - 2)
    fy = (yi - y0)[:, None]
    fx = (xi - x0)[None, :]
    c00 = coarse[np.ix_(y0, x0)]
    c01 = coarse[np.ix_(y0, x0 + 1)]
    c10 = coarse[np.ix_(y0 + 1, x0)]
    c11 = coarse[np.ix_(y0 + 1, x0 + 1)]
    smooth = c00 * (1 - fy) * (1 - fx) + c01 * (1 - fy) * fx + c10 * fy * (1 - fx) + c11 * fy * fx
    return (0.15 + 0.3 * smooth).astype(np.float32)


def head_center(pos: np.ndarray, heading: float, cue: float) -> np.ndarray:
    c, s = math.cos(heading), math.sin(heading)
    fwd = np.array([c, s])
    left = np.array([-s, c])
    return pos + HEAD_FWD * fwd + CUE_LAT * cue * left


def is_occluded(spec: ScenarioSpec, camera_id: int, t: float) -> bool:
    return any(lo - 1e-9 <= t < hi - 1e-9 for lo, hi in spec.occlusion[camera_id - 1])


@dataclass
class _GlyphMasks:
    body_alpha: np.ndarray
    head_alpha: np.ndarray

    @property
    def body_px(self) -> np.ndarray:
        return (self.body_alpha > 0.5) & (self.head_alpha <= 0.5)

    @property
    def head_px(self) -> np.ndarray:
        return self.head_alpha > 0.5

    @property
    def any_px(self) -> np.ndarray:
        return (self.body_alpha > 0.5) | (self.head_alpha > 0.5)


class ScenarioRenderer:
    """Renders (and caches) frames, glyph masks, and flow for one track/camera."""

    def __init__(self, track: ScenarioTrack, camera: CameraModel):
        self.track = track
        self.camera = camera
        self.background = static_background(camera, track.spec.seed)
        self._wx, self._wy = camera.pixel_grid_world()
        self._aa_m = AA_PX * camera.scale_m_per_px
        self._frames: dict[int, np.ndarray] = {}
        self._masks: dict[int, _GlyphMasks] = {}

    def _soft(self, signed_dist_m: np.ndarray) -> np.ndarray:
        return np.clip(signed_dist_m / self._aa_m + 0.5, 0.0, 1.0)

    def _glyph(self, i: int) -> _GlyphMasks:
        if i in self._masks:
            return self._masks[i]
        pos = self.track.true_positions[i]
        psi = float(self.track.headings[i])
        c, s = math.cos(psi), math.sin(psi)
        dx = self._wx - pos[0]
        dy = self._wy - pos[1]
        bx = c * dx + s * dy
        by = -s * dx + c * dy
        body = np.minimum(self._soft(BODY_LEN / 2 - np.abs(bx)),
                          self._soft(BODY_WID / 2 - np.abs(by)))
        hc = head_center(pos, psi, float(self.track.cue[i]))
        hd = np.hypot(self._wx - hc[0], self._wy - hc[1])
        head = self._soft(HEAD_RADIUS - hd)
        masks = _GlyphMasks(body_alpha=body, head_alpha=head)
        self._masks[i] = masks
        return masks

    def glyph_visible(self, i: int) -> bool:
        """Glyph center inside the view with a glyph-sized margin."""
        margin_px = GLYPH_MARGIN_M / self.camera.scale_m_per_px
        return bool(self.camera.in_view(self.track.true_positions[i][None, :], margin_px)[0])

    def frame(self, i: int) -> np.ndarray:
        if i in self._frames:
            return self._frames[i]
        t = float(self.track.timestamps[i])
        if is_occluded(self.track.spec, self.camera.camera_id, t):
            img = self.background.copy()
        else:
            m = self._glyph(i)
            img = self.background * (1 - m.body_alpha) + BODY_INTENSITY * m.body_alpha
            img = img * (1 - m.head_alpha) + HEAD_INTENSITY * m.head_alpha
            img = img.astype(np.float32)
        self._frames[i] = img
        return img

    def flow(self, i: int, j: int) -> np.ndarray:
        """Forward flow (2, H, W): pixel displacement of frame-i glyph pixels
        toward their frame-j locations; zero on the background. Frames where
        the glyph is occlusion-blanked contribute no glyph pixels."""
        h, w = self.camera.image_hw
        out = np.zeros((2, h, w), dtype=np.float32)
        t_i = float(self.track.timestamps[i])
        if is_occluded(self.track.spec, self.camera.camera_id, t_i):
            return out
        m = self._glyph(i)
        p_i, p_j = self.track.true_positions[i], self.track.true_positions[j]
        psi_i, psi_j = float(self.track.headings[i]), float(self.track.headings[j])
        hc_i = head_center(p_i, psi_i, float(self.track.cue[i]))
        hc_j = head_center(p_j, psi_j, float(self.track.cue[j]))
        dpsi = psi_j - psi_i
        cd, sd = math.cos(dpsi), math.sin(dpsi)

        for mask, origin_i, origin_j in ((m.body_px, p_i, p_j), (m.head_px, hc_i, hc_j)):
            if not mask.any():
                continue
            wx = self._wx[mask]
            wy = self._wy[mask]
            rx = wx - origin_i[0]
            ry = wy - origin_i[1]
            nx = origin_j[0] + cd * rx - sd * ry
            ny = origin_j[1] + sd * rx + cd * ry
            uv_old = self.camera.world_to_pixel(np.stack([wx, wy], axis=1))
            uv_new = self.camera.world_to_pixel(np.stack([nx, ny], axis=1))
            d = (uv_new - uv_old).astype(np.float32)
            out[0][mask] = d[:, 0]
            out[1][mask] = d[:, 1]
        return out

    def clip_indices(self, t0: float, clip_len: int = CLIP_LEN,
                     clip_rate_hz: float = CLIP_RATE_HZ) -> list[int]:
        i0 = self.track.index_at(t0)
        step = int(round((1.0 / clip_rate_hz) / self.track.dt))
        idx = [i0 - step * (clip_len - 1 - k) for k in range(clip_len)]
        if idx[0] < 0:
            raise ValueError(f"clip window starting at {t0} precedes the track")
        return idx

    def video_clip(self, t0: float, clip_len: int = CLIP_LEN,
                   clip_rate_hz: float = CLIP_RATE_HZ, check_view: bool = True) -> VideoClip:
        idx = self.clip_indices(t0, clip_len, clip_rate_hz)
        if check_view and not all(self.glyph_visible(i) for i in idx):
            raise OutOfViewError(
                f"cyclist outside camera {self.camera.camera_id} view near t0={t0}")
        return VideoClip(self.camera.camera_id,
                         np.stack([self.frame(i) for i in idx]))

    def flow_clip(self, t0: float, clip_len: int = CLIP_LEN,
                  clip_rate_hz: float = CLIP_RATE_HZ) -> FlowClip:
        idx = self.clip_indices(t0, clip_len, clip_rate_hz)
        flows = [self.flow(a, b) for a, b in zip(idx[:-1], idx[1:])]
        return FlowClip(self.camera.camera_id, np.stack(flows))

    def occluded_in(self, t0: float, clip_len: int = CLIP_LEN,
                    clip_rate_hz: float = CLIP_RATE_HZ) -> bool:
        idx = self.clip_indices(t0, clip_len, clip_rate_hz)
        return any(is_occluded(self.track.spec, self.camera.camera_id,
                               float(self.track.timestamps[i])) for i in idx)


def render_clip(track: ScenarioTrack, camera: CameraModel, t0: float,
                clip_len: int = CLIP_LEN, clip_rate_hz: float = CLIP_RATE_HZ) -> VideoClip:
    """One-shot clip render (the builder uses a cached ScenarioRenderer)."""
    return ScenarioRenderer(track, camera).video_clip(t0, clip_len, clip_rate_hz)


def ground_truth_flow(track: ScenarioTrack, camera: CameraModel, t0: float,
                      clip_len: int = CLIP_LEN, clip_rate_hz: float = CLIP_RATE_HZ) -> FlowClip:
    """Analytic flow for the clip window ending at t0."""
    return ScenarioRenderer(track, camera).flow_clip(t0, clip_len, clip_rate_hz)
