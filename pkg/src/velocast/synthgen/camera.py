"""Virtual overhead cameras: rigid world->pixel mapping at a fixed m/px scale."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CameraModel:
    camera_id: int
    position: tuple[float, float]      # world point mapped to the image center
    view_dir: float                    # rad; world direction shown along image +u
    image_hw: tuple[int, int] = (48, 48)
    scale_m_per_px: float = 0.3

    def __post_init__(self):
        if self.camera_id not in (1, 2):
            raise ValueError(f"camera_id must be 1 or 2, got {self.camera_id}")
        if self.scale_m_per_px <= 0:
            raise ValueError("scale_m_per_px must be > 0")
        h, w = self.image_hw
        if h < 8 or w < 8:
            raise ValueError(f"image dims too small: {self.image_hw}")

    @property
    def fov_m(self) -> tuple[float, float]:
        """Visible world extent (height, width) in meters."""
        return (self.image_hw[0] * self.scale_m_per_px,
                self.image_hw[1] * self.scale_m_per_px)

    def world_to_pixel(self, points: np.ndarray) -> np.ndarray:
        """(N, 2) world meters -> (N, 2) pixel (u, v); u along width, v down."""
        p = np.atleast_2d(np.asarray(points, dtype=np.float64)) - np.asarray(self.position)
        c, s = math.cos(-self.view_dir), math.sin(-self.view_dir)
        x = c * p[:, 0] - s * p[:, 1]
        y = s * p[:, 0] + c * p[:, 1]
        h, w = self.image_hw
        u = w / 2.0 + x / self.scale_m_per_px
        v = h / 2.0 - y / self.scale_m_per_px
        return np.stack([u, v], axis=1)

    def pixel_grid_world(self) -> tuple[np.ndarray, np.ndarray]:
        """World (x, y) coordinates of every pixel center, each (H, W)."""
        h, w = self.image_hw
        u = np.arange(w) + 0.5
        v = np.arange(h) + 0.5
        uu, vv = np.meshgrid(u, v)
        x_cam = (uu - w / 2.0) * self.scale_m_per_px
        y_cam = (h / 2.0 - vv) * self.scale_m_per_px
        c, s = math.cos(self.view_dir), math.sin(self.view_dir)
        wx = c * x_cam - s * y_cam + self.position[0]
        wy = s * x_cam + c * y_cam + self.position[1]
        return wx, wy

    def in_view(self, points: np.ndarray, margin_px: float = 0.0) -> np.ndarray:
        uv = self.world_to_pixel(points)
        h, w = self.image_hw
        return ((uv[:, 0] >= margin_px) & (uv[:, 0] <= w - margin_px)
                & (uv[:, 1] >= margin_px) & (uv[:, 1] <= h - margin_px))
