"""Single-sample inference latency measurement."""
from __future__ import annotations

import platform
import time
from dataclasses import dataclass

import numpy as np
import torch

from ..training.loop import forward_model


@dataclass
class BenchResult:
    median_ms: float
    p95_ms: float
    n_iter: int
    hardware: str


def runtime_bench(model: torch.nn.Module, batch: dict[str, torch.Tensor],
                  n_warmup: int = 5, n_iter: int = 50) -> BenchResult:
    """Median and p95 latency of single-sample inference on frozen parameters."""
    if n_iter < 1:
        raise ValueError("n_iter must be >= 1")
    single = {k: v[:1] for k, v in batch.items()}
    model.eval()
    timings = []
    with torch.no_grad():
        for _ in range(n_warmup):
            forward_model(model, single)
        for _ in range(n_iter):
            t0 = time.perf_counter()
            forward_model(model, single)
            timings.append((time.perf_counter() - t0) * 1e3)
    arr = np.asarray(timings)
    hw = f"{platform.machine()} {platform.processor() or 'cpu'}, " \
         f"torch {torch.__version__}, {torch.get_num_threads()} threads"
    return BenchResult(median_ms=float(np.median(arr)),
                       p95_ms=float(np.percentile(arr, 95)),
                       n_iter=n_iter, hardware=hw)
