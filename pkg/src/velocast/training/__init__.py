from .determinism import enable_deterministic_mode, seed_torch
from .gradcheck import GradCheckReport, grad_check
from .loop import (
    EpochRecord,
    TrainConfig,
    TrainResult,
    collate,
    evaluate_loss,
    forward_model,
    required_keys,
    train,
)
from .loss import forecast_loss, horizon_loss
from .splits import split_by_vru
from .sweep import SweepPoint, SweepRow, default_grid, run_sweep, write_sweep_table

__all__ = [
    "enable_deterministic_mode", "seed_torch", "GradCheckReport", "grad_check",
    "EpochRecord", "TrainConfig", "TrainResult", "collate", "evaluate_loss",
    "forward_model", "required_keys", "train", "forecast_loss", "horizon_loss",
    "split_by_vru", "SweepPoint", "SweepRow", "default_grid", "run_sweep",
    "write_sweep_table",
]
