"""Experiment manifests: a complete, hashable description of an ablation run."""
from __future__ import annotations

import hashlib
import json
from dataclasses import asdict, dataclass, field
from pathlib import Path

from ..core.dataset_io import dataset_checksum
from ..models.msnet import VARIANT_MASKS

DEFAULT_TRAIN = {
    "batch_size": 16,
    "learning_rate": 3e-4,
    "betas": [0.9, 0.999],
    "eps": 1e-8,
    "max_epochs": 20,
    "patience": 5,
    "split_fractions": [0.7, 0.15, 0.15],
    "val_metric": "loss",
}

# The trajectory baseline trains in seconds per epoch; give it large batches
# and enough epochs to converge so comparisons against it are fair.
GRU_TRAIN_OVERRIDES = {"batch_size": 256, "learning_rate": 1e-3,
                       "max_epochs": 300, "patience": 20}


class ManifestError(ValueError):
    """Manifest fails validation (names, masks, or checksum)."""


@dataclass
class ExperimentManifest:
    dataset_path: str
    dataset_checksum: str
    variants: dict[str, dict]
    train: dict = field(default_factory=lambda: dict(DEFAULT_TRAIN))
    seed: int = 0
    deterministic: bool = False

    def validate(self) -> None:
        for name, cfg in self.variants.items():
            if name not in VARIANT_MASKS:
                raise ManifestError(f"unknown variant name {name!r}; expected one of "
                                    f"{sorted(VARIANT_MASKS)}")
            mask = frozenset(cfg.get("input_mask", []))
            if mask != VARIANT_MASKS[name]:
                raise ManifestError(
                    f"variant {name!r} input mask {sorted(mask)} does not match "
                    f"the required {sorted(VARIANT_MASKS[name])}")

    def config_dict(self) -> dict:
        return {
            "dataset_path": self.dataset_path,
            "dataset_checksum": self.dataset_checksum,
            "variants": self.variants,
            "train": self.train,
            "seed": self.seed,
            "deterministic": self.deterministic,
        }

    def content_hash(self) -> str:
        canon = json.dumps(self.config_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canon.encode()).hexdigest()

    def save(self, path: str | Path, resolved_shapes: dict | None = None) -> Path:
        payload = self.config_dict()
        payload["content_hash"] = self.content_hash()
        if resolved_shapes:
            payload["resolved_layer_shapes"] = resolved_shapes
        p = Path(path)
        p.parent.mkdir(parents=True, exist_ok=True)
        p.write_text(json.dumps(payload, indent=1, sort_keys=True))
        return p

    @classmethod
    def load(cls, path: str | Path) -> "ExperimentManifest":
        raw = json.loads(Path(path).read_text())
        m = cls(dataset_path=raw["dataset_path"],
                dataset_checksum=raw["dataset_checksum"],
                variants=raw["variants"], train=raw["train"],
                seed=raw["seed"], deterministic=raw.get("deterministic", False))
        m.validate()
        return m


def variant_config(name: str, width_multiplier: float = 0.2,
                   gru_hidden=(50, 50), mlp_hidden=(100, 100)) -> dict:
    """Model config for one named variant of the input-ablation table."""
    if name not in VARIANT_MASKS:
        raise ManifestError(f"unknown variant name {name!r}")
    if name == "GRU":
        return {"kind": "gru", "input_mask": sorted(VARIANT_MASKS[name]),
                "gru_hidden": list(gru_hidden), "mlp_hidden": list(mlp_hidden),
                "train_overrides": dict(GRU_TRAIN_OVERRIDES)}
    return {"kind": "msnet", "input_mask": sorted(VARIANT_MASKS[name]),
            "width_multiplier": width_multiplier,
            "traj_mlp": [100, 100, 100], "head_mlp": [100, 100, 100],
            "train_overrides": {}}


def default_manifest(dataset_path: str | Path, seed: int = 0,
                     variant_names=None, deterministic: bool = False,
                     train_overrides: dict | None = None) -> ExperimentManifest:
    names = list(variant_names) if variant_names else list(VARIANT_MASKS)
    train = dict(DEFAULT_TRAIN)
    if train_overrides:
        train.update(train_overrides)
    m = ExperimentManifest(
        dataset_path=str(dataset_path),
        dataset_checksum=dataset_checksum(dataset_path),
        variants={name: variant_config(name) for name in names},
        train=train, seed=seed, deterministic=deterministic)
    m.validate()
    return m
