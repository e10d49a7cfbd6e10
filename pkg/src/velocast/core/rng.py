"""Named, reproducible random substreams derived from one base seed."""
from __future__ import annotations

import hashlib

import numpy as np


def substream_seed(base_seed: int, name: str) -> int:
    """Stable derived seed for a named purpose (data, init, batching, ...)."""
    digest = hashlib.sha256(f"{base_seed}:{name}".encode()).digest()
    return int.from_bytes(digest[:8], "little")


def substream(base_seed: int, name: str) -> np.random.Generator:
    return np.random.default_rng(substream_seed(base_seed, name))
