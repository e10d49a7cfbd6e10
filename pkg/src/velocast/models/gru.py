"""Trajectory-only GRU baseline: stacked GRU encoder, MLP head, linear output."""
from __future__ import annotations

from dataclasses import dataclass, field

import torch
import torch.nn as nn


@dataclass(frozen=True)
class GruConfig:
    gru_hidden: tuple[int, ...] = (50, 50)
    mlp_hidden: tuple[int, ...] = (100, 100)
    past_len: int = 50
    horizon_count: int = 125

    def __post_init__(self):
        sizes = (*self.gru_hidden, *self.mlp_hidden)
        if not self.gru_hidden or not self.mlp_hidden or any(s < 1 for s in sizes):
            raise ValueError("all layer sizes must be >= 1")

    @property
    def output_dim(self) -> int:
        return 2 * self.horizon_count


def mlp_stack(in_dim: int, hidden: tuple[int, ...]) -> nn.Sequential:
    layers: list[nn.Module] = []
    for h in hidden:
        layers += [nn.Linear(in_dim, h), nn.ReLU()]
        in_dim = h
    return nn.Sequential(*layers)


class GruForecaster(nn.Module):
    """Consumes the ego past position sequence stepwise; the final step's
    top-layer state feeds the MLP and a linear output of shape (|H|, 2)."""

    def __init__(self, config: GruConfig):
        super().__init__()
        self.config = config
        cells = []
        in_size = 2
        for h in config.gru_hidden:
            cells.append(nn.GRU(input_size=in_size, hidden_size=h, batch_first=True))
            in_size = h
        self.cells = nn.ModuleList(cells)
        self.mlp = mlp_stack(in_size, config.mlp_hidden)
        self.out = nn.Linear(config.mlp_hidden[-1], config.output_dim)

    def forward(self, past: torch.Tensor) -> torch.Tensor:
        if past.dim() != 3 or past.shape[1:] != (self.config.past_len, 2):
            raise ValueError(
                f"expected input (B, {self.config.past_len}, 2), got {tuple(past.shape)}")
        x = past
        for cell in self.cells:
            x, _ = cell(x)
        h = self.mlp(x[:, -1])
        return self.out(h).view(-1, self.config.horizon_count, 2)
