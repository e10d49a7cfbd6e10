"""Checkpoints: text metadata plus raw little-endian float32 parameter blobs."""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np
import torch


def save_checkpoint(model: torch.nn.Module, out_dir: str | Path,
                    config: dict | None = None, seed: int | None = None,
                    step: int = 0, extra: dict | None = None) -> Path:
    out = Path(out_dir)
    (out / "params").mkdir(parents=True, exist_ok=True)
    shapes = {}
    for name, tensor in model.state_dict().items():
        arr = tensor.detach().cpu().numpy()
        if not np.issubdtype(arr.dtype, np.floating):
            arr = arr.astype(np.int64).astype(np.float32)  # step counters etc.
        blob = np.ascontiguousarray(arr, dtype="<f4")
        (out / "params" / f"{name}.bin").write_bytes(blob.tobytes())
        shapes[name] = list(arr.shape)
    meta = {
        "config": config or {},
        "seed": seed,
        "step": step,
        "layer_shapes": shapes,
    }
    if extra:
        meta.update(extra)
    (out / "metadata.json").write_text(json.dumps(meta, indent=1, sort_keys=True))
    return out


def load_checkpoint(model: torch.nn.Module, ckpt_dir: str | Path) -> dict:
    """Restore parameters in place; returns the checkpoint metadata."""
    ckpt = Path(ckpt_dir)
    meta = json.loads((ckpt / "metadata.json").read_text())
    state = model.state_dict()
    new_state = {}
    for name, tensor in state.items():
        path = ckpt / "params" / f"{name}.bin"
        if not path.exists():
            raise FileNotFoundError(f"checkpoint missing parameter blob {name}")
        shape = meta["layer_shapes"][name]
        arr = np.frombuffer(path.read_bytes(), dtype="<f4").reshape(shape)
        new_state[name] = torch.as_tensor(arr.copy()).to(tensor.dtype)
    model.load_state_dict(new_state)
    return meta
