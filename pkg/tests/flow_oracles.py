"""Independent flow verification helpers used only by the test suite."""
from __future__ import annotations

import numpy as np


def bilinear(img: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Sample img (H, W) at continuous pixel-center coordinates (u, v)."""
    h, w = img.shape
    x = np.clip(u - 0.5, 0.0, w - 1.0)
    y = np.clip(v - 0.5, 0.0, h - 1.0)
    x0 = np.floor(x).astype(int).clip(0, w - 2)
    y0 = np.floor(y).astype(int).clip(0, h - 2)
    fx = x - x0
    fy = y - y0
    return (img[y0, x0] * (1 - fy) * (1 - fx)
            + img[y0, x0 + 1] * (1 - fy) * fx
            + img[y0 + 1, x0] * fy * (1 - fx)
            + img[y0 + 1, x0 + 1] * fy * fx)


def warp_error(frame_a: np.ndarray, frame_b: np.ndarray, flow: np.ndarray,
               mask: np.ndarray) -> float:
    """Mean |frame_b(p + flow(p)) - frame_a(p)| over masked pixels of frame_a."""
    vv, uu = np.nonzero(mask)
    u = uu + 0.5 + flow[0][mask]
    v = vv + 0.5 + flow[1][mask]
    warped = bilinear(frame_b, u, v)
    return float(np.mean(np.abs(warped - frame_a[mask])))


def block_match(frame_a: np.ndarray, frame_b: np.ndarray, u: int, v: int,
                patch: int = 3, search: int = 4) -> tuple[int, int]:
    """Integer-pixel displacement of the patch around (u, v) by exhaustive SAD."""
    h, w = frame_a.shape
    ref = frame_a[v - patch: v + patch + 1, u - patch: u + patch + 1]
    best = (0, 0)
    best_err = np.inf
    for dv in range(-search, search + 1):
        for du in range(-search, search + 1):
            v2, u2 = v + dv, u + du
            if v2 - patch < 0 or v2 + patch >= h or u2 - patch < 0 or u2 + patch >= w:
                continue
            cand = frame_b[v2 - patch: v2 + patch + 1, u2 - patch: u2 + patch + 1]
            err = float(np.abs(cand - ref).sum())
            if err < best_err:
                best_err = err
                best = (du, dv)
    return best
