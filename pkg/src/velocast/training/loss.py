"""Horizon-normalized quadratic forecast loss (m^2/s)."""
from __future__ import annotations

import numpy as np
import torch

from ..core.trajectory import ForecastResult


def horizon_loss(gt: torch.Tensor, pred: torch.Tensor,
                 horizon_seconds: torch.Tensor) -> torch.Tensor:
    """Mean over horizons of the squared position error divided by its
    horizon, averaged over the batch.

    gt, pred: (B, |H|, 2); horizon_seconds: (|H|,).
    """
    if gt.shape != pred.shape:
        raise ValueError(f"shape mismatch: gt {tuple(gt.shape)} vs pred {tuple(pred.shape)}")
    if gt.shape[-2] != horizon_seconds.shape[0]:
        raise ValueError("horizon set does not match forecast length")
    sq = (gt - pred).square().sum(dim=-1)
    return (sq / horizon_seconds).mean(dim=-1).mean()


def forecast_loss(gt: ForecastResult, pred: ForecastResult) -> float:
    """Scalar loss for a single forecast pair; horizon sets must match."""
    if gt.horizons != pred.horizons:
        raise ValueError("mismatched horizon sets")
    g = torch.as_tensor(gt.positions, dtype=torch.float64).unsqueeze(0)
    p = torch.as_tensor(pred.positions, dtype=torch.float64).unsqueeze(0)
    h = torch.as_tensor(np.array(gt.horizons.seconds), dtype=torch.float64)
    return float(horizon_loss(g, p, h))
