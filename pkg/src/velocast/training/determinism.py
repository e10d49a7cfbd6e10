"""Strict single-threaded deterministic execution for reproducibility runs."""
from __future__ import annotations

import torch


def enable_deterministic_mode() -> None:
    torch.set_num_threads(1)
    torch.use_deterministic_algorithms(True)


def seed_torch(seed: int) -> None:
    torch.manual_seed(seed % (2 ** 63))
