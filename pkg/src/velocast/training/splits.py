"""VRU-disjoint train/val/test splits."""
from __future__ import annotations

from collections import defaultdict
from typing import Sequence

from ..core.rng import substream
from ..core.sample import Sample


def split_by_vru(samples: Sequence[Sample], fractions=(0.7, 0.15, 0.15),
                 seed: int = 0) -> dict[str, list[Sample]]:
    """Partition VRU ids (not samples) into train/val/test by the given
    fractions. No vru_id ever appears in two splits."""
    if abs(sum(fractions) - 1.0) > 1e-9 or len(fractions) != 3:
        raise ValueError("fractions must be three values summing to 1")
    by_vru: dict[str, list[Sample]] = defaultdict(list)
    for s in samples:
        by_vru[s.vru_id].append(s)
    ids = sorted(by_vru)
    rng = substream(seed, "split")
    rng.shuffle(ids)
    n = len(ids)
    n_train = int(round(fractions[0] * n))
    n_val = int(round(fractions[1] * n))
    parts = {
        "train": ids[:n_train],
        "val": ids[n_train:n_train + n_val],
        "test": ids[n_train + n_val:],
    }
    return {name: [s for vid in sorted(vids) for s in by_vru[vid]]
            for name, vids in parts.items()}
