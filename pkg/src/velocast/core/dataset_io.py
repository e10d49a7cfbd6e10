"""On-disk dataset model: a JSON manifest plus per-sample binary tensor files.

Each ``sample_<k>.bin`` holds four blocks in a fixed order: past trajectory
(N_past, 2), future ground truth (|H|, 2), image clips (2, T, H, W), and flow
clips (2, T-1, 2, H, W). Every block is float32 little-endian, preceded by a
16-byte header: 4-byte magic ``TNSR``, dtype code (u8), rank (u8), and five
u16 dims (unused dims zero). Clip blocks of clip-less datasets have a leading
dim of 0 and an empty payload.
"""
from __future__ import annotations

import hashlib
import json
import struct
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .horizons import HorizonSet
from .sample import FlowClip, MotionState, Sample, VideoClip
from .trajectory import ForecastResult, Frame, TrajectoryWindow

MAGIC = b"TNSR"
DTYPE_F32 = 1
FORMAT_VERSION = 1
DEFAULT_RATE_HZ = 50.0


class DatasetFormatError(ValueError):
    """Manifest/tensor file does not match the declared schema."""


@dataclass
class DatasetMeta:
    n_samples: int
    rate_hz: float
    horizons: HorizonSet
    past_len: int
    clip_len: int
    image_hw: tuple[int, int]
    n_cameras: int = 2
    has_clips: bool = True
    records: list[dict] = field(default_factory=list)


def write_block(fh, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype="<f4")
    if arr.ndim > 5:
        raise DatasetFormatError(f"tensor rank {arr.ndim} exceeds header capacity")
    dims = list(arr.shape) + [0] * (5 - arr.ndim)
    if any(d > 0xFFFF for d in dims):
        raise DatasetFormatError(f"dimension too large for u16 header: {arr.shape}")
    fh.write(MAGIC)
    fh.write(struct.pack("<BB", DTYPE_F32, arr.ndim))
    fh.write(struct.pack("<5H", *dims))
    fh.write(arr.tobytes())


def read_block(fh, expect_shape: tuple[int, ...] | None = None) -> np.ndarray:
    header = fh.read(16)
    if len(header) != 16:
        raise DatasetFormatError("truncated tensor header")
    if header[:4] != MAGIC:
        raise DatasetFormatError(f"bad tensor magic {header[:4]!r}")
    dtype_code, rank = struct.unpack("<BB", header[4:6])
    if dtype_code != DTYPE_F32:
        raise DatasetFormatError(f"unsupported dtype code {dtype_code}")
    dims = struct.unpack("<5H", header[6:16])[:rank]
    if expect_shape is not None and tuple(dims) != tuple(expect_shape):
        raise DatasetFormatError(f"tensor shape {dims} != manifest-declared {expect_shape}")
    count = int(np.prod(dims)) if rank else 1
    payload = fh.read(4 * count)
    if len(payload) != 4 * count:
        raise DatasetFormatError("truncated tensor payload")
    return np.frombuffer(payload, dtype="<f4").reshape(dims).astype(np.float32)


def _sample_filename(k: int) -> str:
    return f"sample_{k:05d}.bin"


def _sample_blocks(sample: Sample) -> list[np.ndarray]:
    past = sample.past.positions.astype(np.float32)
    future = sample.future_gt.positions.astype(np.float32)
    if sample.has_clips:
        video = np.stack([c.frames for c in sample.video])
        flow = np.stack([c.frames for c in sample.flow])
    else:
        t = DEFAULT_CLIP_FALLBACK_T
        video = np.zeros((0, t, 0, 0), dtype=np.float32)
        flow = np.zeros((0, t - 1, 2, 0, 0), dtype=np.float32)
    return [past, future, video, flow]


DEFAULT_CLIP_FALLBACK_T = 10


def save_dataset(samples: Sequence[Sample], out_dir: str | Path,
                 rate_hz: float = DEFAULT_RATE_HZ,
                 horizons: HorizonSet | None = None) -> Path:
    """Write samples and a manifest under ``out_dir``; returns the manifest path."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    samples = list(samples)
    if samples:
        horizons = samples[0].future_gt.horizons
        past_len = len(samples[0].past)
        has_clips = samples[0].has_clips
        if has_clips:
            t, h, w = samples[0].video[0].frames.shape
        else:
            t, h, w = DEFAULT_CLIP_FALLBACK_T, 0, 0
    else:
        horizons = horizons or HorizonSet()
        past_len, has_clips, (t, h, w) = 0, False, (DEFAULT_CLIP_FALLBACK_T, 0, 0)

    records = []
    for k, s in enumerate(samples):
        name = _sample_filename(k)
        with open(out / name, "wb") as fh:
            for block in _sample_blocks(s):
                write_block(fh, block)
        digest = hashlib.sha256((out / name).read_bytes()).hexdigest()
        records.append({
            "file": name,
            "vru_id": s.vru_id,
            "t0": s.t0,
            "motion_state": s.motion_state.value,
            "occluded": list(s.occluded),
            "anchor": [s.anchor_xy[0], s.anchor_xy[1], s.anchor_heading],
            "sha256": digest,
        })

    manifest = {
        "format_version": FORMAT_VERSION,
        "n_samples": len(samples),
        "rate_hz": rate_hz,
        "horizon_step": horizons.step,
        "horizon_count": horizons.count,
        "past_len": past_len,
        "clip_len": t,
        "image_height": h,
        "image_width": w,
        "n_cameras": 2,
        "has_clips": has_clips,
        "samples": records,
    }
    manifest_path = out / "manifest.json"
    manifest_path.write_text(json.dumps(manifest, indent=1, sort_keys=True))
    return manifest_path


def read_meta(manifest_path: str | Path) -> DatasetMeta:
    path = Path(manifest_path)
    if path.is_dir():
        path = path / "manifest.json"
    if not path.exists():
        raise FileNotFoundError(f"no manifest found at {path}")
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise DatasetFormatError(f"manifest is not valid JSON: {exc}") from exc
    required = {"format_version", "n_samples", "rate_hz", "horizon_step", "horizon_count",
                "past_len", "clip_len", "image_height", "image_width", "n_cameras",
                "has_clips", "samples"}
    missing = required - raw.keys()
    if missing:
        raise DatasetFormatError(f"manifest missing keys: {sorted(missing)}")
    if raw["format_version"] != FORMAT_VERSION:
        raise DatasetFormatError(f"unsupported manifest version {raw['format_version']}")
    if len(raw["samples"]) != raw["n_samples"]:
        raise DatasetFormatError("manifest sample count disagrees with record list")
    return DatasetMeta(
        n_samples=raw["n_samples"],
        rate_hz=raw["rate_hz"],
        horizons=HorizonSet(step=raw["horizon_step"], count=raw["horizon_count"]),
        past_len=raw["past_len"],
        clip_len=raw["clip_len"],
        image_hw=(raw["image_height"], raw["image_width"]),
        n_cameras=raw["n_cameras"],
        has_clips=raw["has_clips"],
        records=raw["samples"],
    )


def load_dataset(manifest_path: str | Path, load_clips: bool = True) -> list[Sample]:
    """Load every sample listed in the manifest. ``load_clips=False`` skips
    clip payloads (trajectory-only training)."""
    path = Path(manifest_path)
    root = path.parent if path.is_file() else Path(manifest_path)
    meta = read_meta(manifest_path)
    t, (h, w) = meta.clip_len, meta.image_hw
    dt = 1.0 / meta.rate_hz

    samples = []
    for rec in meta.records:
        fpath = root / rec["file"]
        if not fpath.exists():
            raise DatasetFormatError(f"missing tensor file {fpath}")
        with open(fpath, "rb") as fh:
            past = read_block(fh, (meta.past_len, 2))
            future = read_block(fh, (meta.horizons.count, 2))
            if meta.has_clips:
                video = read_block(fh, (2, t, h, w))
                flow = read_block(fh, (2, t - 1, 2, h, w))
            else:
                video = read_block(fh)
                flow = read_block(fh)
        t0 = float(rec["t0"])
        timestamps = t0 + dt * np.arange(-(meta.past_len - 1), 1)
        window = TrajectoryWindow(frame=Frame.EGO, timestamps=timestamps,
                                  positions=past.astype(np.float64))
        gt = ForecastResult(horizons=meta.horizons, positions=future.astype(np.float64))
        pair = None
        flow_pair = None
        if meta.has_clips and load_clips:
            pair = (VideoClip(1, video[0]), VideoClip(2, video[1]))
            flow_pair = (FlowClip(1, flow[0]), FlowClip(2, flow[1]))
        ax, ay, ah = rec.get("anchor", [0.0, 0.0, 0.0])
        samples.append(Sample(
            vru_id=rec["vru_id"], t0=t0, past=window, future_gt=gt,
            motion_state=MotionState(rec["motion_state"]),
            video=pair, flow=flow_pair,
            occluded=tuple(bool(b) for b in rec.get("occluded", [False, False])),
            anchor_xy=(float(ax), float(ay)), anchor_heading=float(ah),
        ))
    return samples


def dataset_checksum(manifest_path: str | Path) -> str:
    """Content hash of a dataset: sha256 over the manifest text (which embeds
    per-file hashes)."""
    path = Path(manifest_path)
    if path.is_dir():
        path = path / "manifest.json"
    return hashlib.sha256(path.read_bytes()).hexdigest()


def iter_sample_files(manifest_path: str | Path) -> Iterable[Path]:
    path = Path(manifest_path)
    root = path.parent if path.is_file() else Path(manifest_path)
    for rec in read_meta(manifest_path).records:
        yield root / rec["file"]
