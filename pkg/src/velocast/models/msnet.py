"""Motion-sequence fusion network: per-camera two-stream 3D-conv features
plus trajectory-MLP features, concatenated into a shared output head.

The image extractors of cameras 1 and 2 are one module (one parameter set);
likewise the flow extractors. Streams absent from the input mask are not
built at all, so the head input width depends on the configuration.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import torch
import torch.nn as nn

from .gru import mlp_stack
from .streams import StreamNet, StreamSpec, stream_parameter_count

STREAM_KEYS = ("I1", "I2", "OF1", "OF2", "T")
IMAGE_KEYS = ("I1", "I2")
FLOW_KEYS = ("OF1", "OF2")


@dataclass(frozen=True)
class MsNetConfig:
    input_mask: frozenset[str] = frozenset(STREAM_KEYS)
    width_multiplier: float = 0.2
    traj_mlp: tuple[int, ...] = (100, 100, 100)
    head_mlp: tuple[int, ...] = (100, 100, 100)
    clip_len: int = 10
    image_hw: tuple[int, int] = (48, 48)
    past_len: int = 50
    horizon_count: int = 125

    def __post_init__(self):
        mask = frozenset(self.input_mask)
        object.__setattr__(self, "input_mask", mask)
        unknown = mask - set(STREAM_KEYS)
        if unknown:
            raise ValueError(f"unknown input streams: {sorted(unknown)}")
        if "T" not in mask:
            raise ValueError("the trajectory stream T is always required")

    @property
    def image_keys(self) -> tuple[str, ...]:
        return tuple(k for k in IMAGE_KEYS if k in self.input_mask)

    @property
    def flow_keys(self) -> tuple[str, ...]:
        return tuple(k for k in FLOW_KEYS if k in self.input_mask)

    def image_stream_spec(self) -> StreamSpec:
        return StreamSpec(in_channels=1, clip_len=self.clip_len,
                          image_hw=self.image_hw, width_multiplier=self.width_multiplier)

    def flow_stream_spec(self) -> StreamSpec:
        return StreamSpec(in_channels=2, clip_len=self.clip_len - 1,
                          image_hw=self.image_hw, width_multiplier=self.width_multiplier)


class MotionSequenceNet(nn.Module):
    def __init__(self, config: MsNetConfig):
        super().__init__()
        self.config = config
        self.image_stream = StreamNet(config.image_stream_spec()) if config.image_keys else None
        self.flow_stream = StreamNet(config.flow_stream_spec()) if config.flow_keys else None
        self.traj_mlp = mlp_stack(config.past_len * 2, config.traj_mlp)

        head_in = (len(config.image_keys) * (self.image_stream.feature_dim if self.image_stream else 0)
                   + len(config.flow_keys) * (self.flow_stream.feature_dim if self.flow_stream else 0)
                   + config.traj_mlp[-1])
        self.head_in = head_in
        self.head = mlp_stack(head_in, config.head_mlp)
        self.out = nn.Linear(config.head_mlp[-1], 2 * config.horizon_count)

    def stream_features(self, batch: dict[str, torch.Tensor]) -> list[torch.Tensor]:
        """Ordered concatenation segments: active streams (I1, I2, OF1, OF2)
        then the trajectory features."""
        feats = []
        for key in self.config.image_keys:
            feats.append(self.image_stream(self._require(batch, key)))
        for key in self.config.flow_keys:
            feats.append(self.flow_stream(self._require(batch, key)))
        past = self._require(batch, "T")
        feats.append(self.traj_mlp(past.flatten(1)))
        return feats

    def forward(self, batch: dict[str, torch.Tensor]) -> torch.Tensor:
        z = torch.cat(self.stream_features(batch), dim=1)
        out = self.out(self.head(z))
        return out.view(-1, self.config.horizon_count, 2)

    @staticmethod
    def _require(batch, key):
        if key not in batch:
            raise KeyError(f"input mask requires stream {key!r} but the batch lacks it")
        return batch[key]


def mlp_parameter_count(in_dim: int, hidden: tuple[int, ...]) -> int:
    total = 0
    for h in hidden:
        total += in_dim * h + h
        in_dim = h
    return total


def analytic_parameter_count(config: MsNetConfig) -> int:
    """Expected parameter total: shared extractors are counted once per
    stream type no matter how many cameras feed them."""
    total = 0
    if config.image_keys:
        total += stream_parameter_count(config.image_stream_spec())
    if config.flow_keys:
        total += stream_parameter_count(config.flow_stream_spec())
    total += mlp_parameter_count(config.past_len * 2, config.traj_mlp)
    feat = 0
    if config.image_keys:
        feat += len(config.image_keys) * config.image_stream_spec().feature_dim
    if config.flow_keys:
        feat += len(config.flow_keys) * config.flow_stream_spec().feature_dim
    feat += config.traj_mlp[-1]
    total += mlp_parameter_count(feat, config.head_mlp)
    total += config.head_mlp[-1] * 2 * config.horizon_count + 2 * config.horizon_count
    return total


# Input masks of the eight evaluated variants, keyed by their table names.
VARIANT_MASKS: dict[str, frozenset[str]] = {
    "GRU": frozenset({"T"}),
    "MS_I;1": frozenset({"I1", "T"}),
    "MS_I;2": frozenset({"I2", "T"}),
    "MS_OF;1": frozenset({"OF1", "T"}),
    "MS_OF;2": frozenset({"OF2", "T"}),
    "MS_I": frozenset({"I1", "I2", "T"}),
    "MS_OF": frozenset({"OF1", "OF2", "T"}),
    "MS_I;OF": frozenset({"I1", "I2", "OF1", "OF2", "T"}),
}
HEADLINE_VARIANTS = ("GRU", "MS_I", "MS_OF", "MS_I;OF")
