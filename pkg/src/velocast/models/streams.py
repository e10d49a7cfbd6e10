"""Spatiotemporal feature extractors: inflated-inception 3D conv stacks.

The channel schedule follows the canonical inflated-inception layout scaled by
a width multiplier; temporal pool strides are capped so the temporal dimension
never collapses below one before the global average pool.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import torch
import torch.nn as nn


class StreamConfigError(ValueError):
    """Clip dimensions are incompatible with the stride schedule."""


@dataclass(frozen=True)
class InceptionBlock3dSpec:
    """Per-branch channel counts: 1x1x1; 1x1x1->3x3x3; 1x1x1->3x3x3; pool->1x1x1."""

    b1: int
    b2_reduce: int
    b2: int
    b3_reduce: int
    b3: int
    b4: int

    @property
    def out_channels(self) -> int:
        return self.b1 + self.b2 + self.b3 + self.b4

    def scaled(self, w: float) -> "InceptionBlock3dSpec":
        return InceptionBlock3dSpec(*(max(1, round(w * c)) for c in
                                      (self.b1, self.b2_reduce, self.b2,
                                       self.b3_reduce, self.b3, self.b4)))


# Reference widths of the canonical inflated-inception stack.
REFERENCE_STEM = 64
REFERENCE_CONV2 = 64
REFERENCE_CONV3 = 192
REFERENCE_BLOCKS: tuple[InceptionBlock3dSpec, ...] = (
    InceptionBlock3dSpec(64, 96, 128, 16, 32, 32),
    InceptionBlock3dSpec(128, 128, 192, 32, 96, 64),
    InceptionBlock3dSpec(192, 96, 208, 16, 48, 64),
    InceptionBlock3dSpec(160, 112, 224, 24, 64, 64),
    InceptionBlock3dSpec(128, 128, 256, 24, 64, 64),
    InceptionBlock3dSpec(112, 144, 288, 32, 64, 64),
    InceptionBlock3dSpec(256, 160, 320, 32, 128, 128),
    InceptionBlock3dSpec(256, 160, 320, 32, 128, 128),
    InceptionBlock3dSpec(384, 192, 384, 48, 128, 128),
)
# Max pools sit after blocks 2 and 7 (0-based: after index 1 and 6).
POOL_AFTER = (1, 6)


@dataclass(frozen=True)
class StreamSpec:
    """Resolved configuration of one 3D-conv stream.

    ``n_blocks`` truncates the inception stack (tiny nets for gradient
    checks); the default keeps the full nine-block schedule."""

    in_channels: int
    clip_len: int
    image_hw: tuple[int, int]
    width_multiplier: float = 0.2
    n_blocks: int = len(REFERENCE_BLOCKS)

    def __post_init__(self):
        if not (0.0 < self.width_multiplier <= 1.0):
            raise StreamConfigError("width_multiplier must be in (0, 1]")
        if self.in_channels < 1 or self.clip_len < 1:
            raise StreamConfigError("in_channels and clip_len must be >= 1")
        if not (1 <= self.n_blocks <= len(REFERENCE_BLOCKS)):
            raise StreamConfigError(f"n_blocks must be in [1, {len(REFERENCE_BLOCKS)}]")

    def scale(self, c: int) -> int:
        return max(1, round(self.width_multiplier * c))

    @property
    def blocks(self) -> tuple[InceptionBlock3dSpec, ...]:
        return tuple(b.scaled(self.width_multiplier)
                     for b in REFERENCE_BLOCKS[: self.n_blocks])

    @property
    def feature_dim(self) -> int:
        return self.blocks[-1].out_channels


def _conv_out(size: int, kernel: int, stride: int, pad: int) -> int:
    return (size + 2 * pad - kernel) // stride + 1


def _capped_temporal(t: int, kernel: int, stride: int, pad: int) -> tuple[int, int, int]:
    """Shrink a pool's temporal kernel/stride so the dim never hits zero."""
    if _conv_out(t, kernel, stride, pad) < 1:
        return 1, 1, 0
    return kernel, stride, pad


def plan_layers(spec: StreamSpec) -> list[dict]:
    """Symbolic layer plan: op, geometry, and output (C, T, H, W) per layer.

    Raises StreamConfigError when the spatial dims collapse before the global
    pool; used both to build the network and to validate configs early."""
    t, (h, w) = spec.clip_len, spec.image_hw
    c = spec.in_channels
    plan: list[dict] = []

    def add(name, op, cout, k, s, p, t_cap=False):
        nonlocal c, t, h, w
        kt, st, pt = (k[0], s[0], p[0])
        if t_cap:
            kt, st, pt = _capped_temporal(t, kt, st, pt)
        t2 = _conv_out(t, kt, st, pt)
        h2 = _conv_out(h, k[1], s[1], p[1])
        w2 = _conv_out(w, k[2], s[2], p[2])
        if min(t2, h2, w2) < 1:
            raise StreamConfigError(
                f"{name}: dims collapse to ({t2}, {h2}, {w2}) for clip "
                f"{spec.clip_len}x{spec.image_hw}")
        plan.append({"name": name, "op": op, "cin": c, "cout": cout,
                     "kernel": (kt, k[1], k[2]), "stride": (st, s[1], s[2]),
                     "pad": (pt, p[1], p[2]), "out": (cout, t2, h2, w2)})
        c, t, h, w = cout, t2, h2, w2

    add("stem", "conv", spec.scale(REFERENCE_STEM), (7, 7, 7), (2, 2, 2), (3, 3, 3))
    add("pool1", "maxpool", c, (1, 3, 3), (1, 2, 2), (0, 1, 1))
    add("conv2", "conv", spec.scale(REFERENCE_CONV2), (1, 1, 1), (1, 1, 1), (0, 0, 0))
    add("conv3", "conv", spec.scale(REFERENCE_CONV3), (3, 3, 3), (1, 1, 1), (1, 1, 1))
    add("pool2", "maxpool", c, (1, 3, 3), (1, 2, 2), (0, 1, 1))
    blocks = spec.blocks
    for i, block in enumerate(blocks):
        plan.append({"name": f"inc{i}", "op": "inception", "cin": c,
                     "cout": block.out_channels, "spec": block,
                     "out": (block.out_channels, t, h, w)})
        c = block.out_channels
        if i == len(blocks) - 1:
            break
        if i == POOL_AFTER[0]:
            add("pool3", "maxpool", c, (3, 3, 3), (2, 2, 2), (1, 1, 1), t_cap=True)
        elif i == POOL_AFTER[1]:
            add("pool4", "maxpool", c, (2, 2, 2), (2, 2, 2), (0, 0, 0), t_cap=True)
    plan.append({"name": "global_pool", "op": "avgpool", "cin": c, "cout": c,
                 "out": (c, 1, 1, 1)})
    return plan


def stream_parameter_count(spec: StreamSpec) -> int:
    """Analytic parameter total: conv weights (no bias) plus affine batch-norm."""
    total = 0

    def conv(cin, cout, k):
        return cin * cout * k[0] * k[1] * k[2] + 2 * cout

    for layer in plan_layers(spec):
        if layer["op"] == "conv":
            total += conv(layer["cin"], layer["cout"], layer["kernel"])
        elif layer["op"] == "inception":
            b = layer["spec"]
            cin = layer["cin"]
            total += conv(cin, b.b1, (1, 1, 1))
            total += conv(cin, b.b2_reduce, (1, 1, 1)) + conv(b.b2_reduce, b.b2, (3, 3, 3))
            total += conv(cin, b.b3_reduce, (1, 1, 1)) + conv(b.b3_reduce, b.b3, (3, 3, 3))
            total += conv(cin, b.b4, (1, 1, 1))
    return total


class ConvUnit3d(nn.Module):
    def __init__(self, cin, cout, kernel, stride=1, pad=0):
        super().__init__()
        self.conv = nn.Conv3d(cin, cout, kernel, stride, pad, bias=False)
        self.bn = nn.BatchNorm3d(cout)
        self.act = nn.ReLU()

    def forward(self, x):
        return self.act(self.bn(self.conv(x)))


class InceptionBlock3d(nn.Module):
    def __init__(self, cin: int, spec: InceptionBlock3dSpec):
        super().__init__()
        self.branch1 = ConvUnit3d(cin, spec.b1, 1)
        self.branch2 = nn.Sequential(ConvUnit3d(cin, spec.b2_reduce, 1),
                                     ConvUnit3d(spec.b2_reduce, spec.b2, 3, 1, 1))
        self.branch3 = nn.Sequential(ConvUnit3d(cin, spec.b3_reduce, 1),
                                     ConvUnit3d(spec.b3_reduce, spec.b3, 3, 1, 1))
        self.branch4 = nn.Sequential(nn.MaxPool3d(3, 1, 1), ConvUnit3d(cin, spec.b4, 1))

    def forward(self, x):
        return torch.cat([self.branch1(x), self.branch2(x),
                          self.branch3(x), self.branch4(x)], dim=1)


class StreamNet(nn.Module):
    """One 3D-conv feature extractor; forward maps a clip batch to (B, F)."""

    def __init__(self, spec: StreamSpec):
        super().__init__()
        self.spec = spec
        self.plan = plan_layers(spec)
        layers: list[nn.Module] = []
        for layer in self.plan:
            if layer["op"] == "conv":
                layers.append(ConvUnit3d(layer["cin"], layer["cout"],
                                         layer["kernel"], layer["stride"], layer["pad"]))
            elif layer["op"] == "maxpool":
                layers.append(nn.MaxPool3d(layer["kernel"], layer["stride"], layer["pad"]))
            elif layer["op"] == "inception":
                layers.append(InceptionBlock3d(layer["cin"], layer["spec"]))
            else:
                layers.append(nn.AdaptiveAvgPool3d(1))
        self.body = nn.Sequential(*layers)
        self.feature_dim = self.plan[-1]["cout"]

    def forward(self, clip: torch.Tensor) -> torch.Tensor:
        want = (self.spec.in_channels, self.spec.clip_len, *self.spec.image_hw)
        if clip.dim() != 5 or tuple(clip.shape[1:]) != want:
            raise ValueError(f"expected clip batch (B, {want}), got {tuple(clip.shape)}")
        return self.body(clip).flatten(1)


def tiny_stream_spec(in_channels: int = 1, clip_len: int = 4,
                     image_hw: tuple[int, int] = (16, 16)) -> StreamSpec:
    """Miniature stream for gradient checks: 2-filter stem, one inception
    block, well under 5e3 parameters."""
    return StreamSpec(in_channels=in_channels, clip_len=clip_len,
                      image_hw=image_hw, width_multiplier=0.03, n_blocks=1)
