"""Minibatch Adam training with per-epoch validation and early stopping."""
from __future__ import annotations

import copy
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Sequence

import numpy as np
import torch

from ..core.rng import substream
from ..core.sample import Sample
from ..models.gru import GruForecaster
from ..models.msnet import MotionSequenceNet
from .loss import horizon_loss


@dataclass(frozen=True)
class TrainConfig:
    batch_size: int = 16
    learning_rate: float = 1e-4
    betas: tuple[float, float] = (0.9, 0.999)
    eps: float = 1e-8
    max_epochs: int = 50
    patience: int = 10
    split_fractions: tuple[float, float, float] = (0.7, 0.15, 0.15)
    seed: int = 0
    val_metric: str = "loss"   # "loss" or "asaee"

    def __post_init__(self):
        if self.batch_size < 1 or self.max_epochs < 1 or self.patience < 0:
            raise ValueError("batch_size, max_epochs must be >= 1; patience >= 0")
        if abs(sum(self.split_fractions) - 1.0) > 1e-9:
            raise ValueError("split fractions must sum to 1")
        if self.val_metric not in ("loss", "asaee"):
            raise ValueError(f"unknown val_metric {self.val_metric!r}")


@dataclass
class EpochRecord:
    epoch: int
    train_loss: float
    val_loss: float
    wall_ms: float


@dataclass
class TrainResult:
    history: list[EpochRecord] = field(default_factory=list)
    best_val: float = float("inf")
    best_epoch: int = -1
    best_state: dict = field(default_factory=dict)
    steps: int = 0


def required_keys(model: torch.nn.Module) -> tuple[str, ...]:
    if isinstance(model, MotionSequenceNet):
        order = ("I1", "I2", "OF1", "OF2", "T")
        return tuple(k for k in order if k in model.config.input_mask)
    return ("T",)


def collate(samples: Sequence[Sample], keys: Sequence[str],
            dtype=torch.float32) -> dict[str, torch.Tensor]:
    """Stack samples into model input tensors plus the ground truth 'gt'."""
    out: dict[str, torch.Tensor] = {}
    for key in keys:
        if key == "T":
            arr = np.stack([s.past.positions for s in samples])
        elif key in ("I1", "I2"):
            cam = 0 if key == "I1" else 1
            arr = np.stack([s.video[cam].frames[None] for s in samples])
        else:
            cam = 0 if key == "OF1" else 1
            arr = np.stack([np.transpose(s.flow[cam].frames, (1, 0, 2, 3))
                            for s in samples])
        out[key] = torch.as_tensor(arr, dtype=dtype)
    out["gt"] = torch.as_tensor(np.stack([s.future_gt.positions for s in samples]),
                                dtype=dtype)
    return out


def forward_model(model: torch.nn.Module, batch: dict[str, torch.Tensor]) -> torch.Tensor:
    if isinstance(model, MotionSequenceNet) or getattr(model, "takes_batch_dict", False):
        return model(batch)
    return model(batch["T"])


def _index_batch(data: dict[str, torch.Tensor], idx) -> dict[str, torch.Tensor]:
    return {k: v[idx] for k, v in data.items()}


def _batch_slices(n: int, batch_size: int, rng: np.random.Generator):
    order = rng.permutation(n)
    batches = [order[i:i + batch_size] for i in range(0, n, batch_size)]
    # Batch-norm cannot normalize a single sample: fold a trailing singleton
    # into the previous batch.
    if len(batches) > 1 and len(batches[-1]) == 1:
        batches[-2] = np.concatenate([batches[-2], batches[-1]])
        batches.pop()
    return batches


def evaluate_loss(model, data: dict[str, torch.Tensor], horizons: torch.Tensor,
                  metric: str = "loss", chunk: int = 256) -> float:
    model.eval()
    n = data["gt"].shape[0]
    errs = []
    with torch.no_grad():
        for i in range(0, n, chunk):
            batch = _index_batch(data, slice(i, i + chunk))
            pred = forward_model(model, batch)
            if metric == "loss":
                sq = (batch["gt"] - pred).square().sum(dim=-1)
                errs.append((sq / horizons).mean(dim=-1))
            else:  # asaee
                d = (batch["gt"] - pred).square().sum(dim=-1).sqrt()
                errs.append(d / horizons)
    if metric == "loss":
        return float(torch.cat(errs).mean())
    return float(torch.cat(errs, dim=0).mean(dim=0).mean())


def train(model: torch.nn.Module,
          train_samples: Sequence[Sample],
          val_samples: Sequence[Sample],
          cfg: TrainConfig,
          log_path: str | Path | None = None,
          quiet: bool = True) -> TrainResult:
    """Adam on the horizon loss; keeps the best-validation parameters and
    stops after ``patience`` epochs without improvement."""
    if not train_samples:
        raise ValueError("empty training set")
    keys = required_keys(model)
    train_data = collate(train_samples, keys)
    val_data = collate(val_samples, keys) if val_samples else train_data
    horizons = torch.as_tensor(
        np.array(train_samples[0].future_gt.horizons.seconds), dtype=torch.float32)

    opt = torch.optim.Adam(model.parameters(), lr=cfg.learning_rate,
                           betas=cfg.betas, eps=cfg.eps)
    rng = substream(cfg.seed, "batching")
    result = TrainResult()
    epochs_since_best = 0
    log_fh = open(log_path, "a") if log_path else None

    try:
        for epoch in range(cfg.max_epochs):
            t0 = time.perf_counter()
            model.train()
            losses = []
            for b, idx in enumerate(_batch_slices(len(train_samples), cfg.batch_size, rng)):
                batch = _index_batch(train_data, idx)
                pred = forward_model(model, batch)
                loss = horizon_loss(batch["gt"], pred, horizons)
                if not torch.isfinite(loss):
                    pnorm = torch.sqrt(sum(p.square().sum() for p in model.parameters()))
                    raise RuntimeError(
                        f"non-finite loss {loss.item()} in batch {b} of epoch {epoch}; "
                        f"parameter norm {pnorm.item():.3e}")
                opt.zero_grad()
                loss.backward()
                opt.step()
                result.steps += 1
                losses.append(loss.item())
            val = evaluate_loss(model, val_data, horizons, cfg.val_metric)
            rec = EpochRecord(epoch=epoch, train_loss=float(np.mean(losses)),
                              val_loss=val, wall_ms=(time.perf_counter() - t0) * 1e3)
            result.history.append(rec)
            if log_fh:
                log_fh.write(f"{rec.epoch},{rec.train_loss:.8e},{rec.val_loss:.8e},"
                             f"{rec.wall_ms:.1f}\n")
                log_fh.flush()
            if not quiet:
                print(f"epoch {epoch}: train {rec.train_loss:.5f} val {val:.5f}")
            if val < result.best_val:
                result.best_val = val
                result.best_epoch = epoch
                result.best_state = copy.deepcopy(model.state_dict())
                epochs_since_best = 0
            else:
                epochs_since_best += 1
                if epochs_since_best > cfg.patience:
                    break
    finally:
        if log_fh:
            log_fh.close()

    if result.best_state:
        model.load_state_dict(result.best_state)
    return result
