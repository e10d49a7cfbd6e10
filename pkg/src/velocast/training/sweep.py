"""Exhaustive hyperparameter grid for the trajectory baseline."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Sequence

import torch

from ..core.rng import substream_seed
from ..core.sample import Sample
from ..models.gru import GruConfig, GruForecaster
from .determinism import seed_torch
from .loop import TrainConfig, TrainResult, train

# Default axes: every combination is trained and the best validation score wins.
DEFAULT_GRU_LAYERS: tuple[tuple[int, ...], ...] = ((50,), (50, 50), (100,), (100, 100))
DEFAULT_MLP_LAYERS: tuple[tuple[int, ...], ...] = (
    (10, 10), (100, 100), (100, 100, 100), (1000, 1000))
DEFAULT_BATCH_SIZES: tuple[int, ...] = (1000, 5000, 10000)
DEFAULT_LEARNING_RATES: tuple[float, ...] = (5e-4, 1e-4, 1e-5)


@dataclass(frozen=True)
class SweepPoint:
    gru_hidden: tuple[int, ...]
    mlp_hidden: tuple[int, ...]
    batch_size: int
    learning_rate: float

    @property
    def key(self) -> str:
        gh = "x".join(map(str, self.gru_hidden))
        mh = "x".join(map(str, self.mlp_hidden))
        return f"gru[{gh}]_mlp[{mh}]_bs{self.batch_size}_lr{self.learning_rate:g}"


@dataclass
class SweepRow:
    point: SweepPoint
    val_loss: float
    best: bool = False
    status: str = "ok"


def default_grid() -> list[SweepPoint]:
    return [SweepPoint(g, m, b, lr) for g, m, b, lr in itertools.product(
        DEFAULT_GRU_LAYERS, DEFAULT_MLP_LAYERS, DEFAULT_BATCH_SIZES,
        DEFAULT_LEARNING_RATES)]


def run_sweep(train_samples: Sequence[Sample], val_samples: Sequence[Sample],
              grid: Sequence[SweepPoint] | None = None,
              base_cfg: TrainConfig | None = None,
              out_path: str | Path | None = None,
              past_len: int = 50, horizon_count: int = 125) -> list[SweepRow]:
    """Train every grid point and mark the minimum-validation-loss winner.

    A failing run is recorded with its error and the sweep continues."""
    grid = list(grid) if grid is not None else default_grid()
    base_cfg = base_cfg or TrainConfig()
    rows: list[SweepRow] = []
    for point in grid:
        cfg = replace(base_cfg, batch_size=point.batch_size,
                      learning_rate=point.learning_rate,
                      seed=substream_seed(base_cfg.seed, f"sweep/{point.key}"))
        seed_torch(cfg.seed)
        model = GruForecaster(GruConfig(gru_hidden=point.gru_hidden,
                                        mlp_hidden=point.mlp_hidden,
                                        past_len=past_len,
                                        horizon_count=horizon_count))
        try:
            result: TrainResult = train(model, train_samples, val_samples, cfg)
            rows.append(SweepRow(point=point, val_loss=result.best_val))
        except Exception as exc:  # keep sweeping; record the failure
            rows.append(SweepRow(point=point, val_loss=float("inf"),
                                 status=f"failed: {exc}"))
    ok = [r for r in rows if r.status == "ok"]
    if ok:
        min(ok, key=lambda r: r.val_loss).best = True
    if out_path is not None:
        write_sweep_table(rows, out_path)
    return rows


def write_sweep_table(rows: Sequence[SweepRow], out_path: str | Path) -> None:
    lines = ["gru_layers\tmlp_layers\tbatch_size\tlearning_rate\tval_loss\tbest\tstatus"]
    for r in rows:
        p = r.point
        lines.append("\t".join([
            "[" + " ".join(map(str, p.gru_hidden)) + "]",
            "[" + " ".join(map(str, p.mlp_hidden)) + "]",
            str(p.batch_size), f"{p.learning_rate:g}", f"{r.val_loss:.8e}",
            "*" if r.best else "", r.status]))
    Path(out_path).write_text("\n".join(lines) + "\n")
