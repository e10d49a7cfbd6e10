"""Forecast horizon grids."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

DEFAULT_STEP = 0.02
DEFAULT_COUNT = 125


@dataclass(frozen=True)
class HorizonSet:
    """Uniform grid of forecast horizons: h_i = (i + 1) * step, in seconds.

    The default grid is 0.02 s .. 2.5 s in 0.02 s steps (125 horizons).
    """

    step: float = DEFAULT_STEP
    count: int = DEFAULT_COUNT
    seconds: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.step <= 0:
            raise ValueError(f"horizon step must be > 0, got {self.step}")
        if self.count < 1:
            raise ValueError(f"horizon count must be >= 1, got {self.count}")
        secs = (np.arange(self.count, dtype=np.float64) + 1.0) * self.step
        secs.setflags(write=False)
        object.__setattr__(self, "seconds", secs)

    def __len__(self) -> int:
        return self.count

    @property
    def max_seconds(self) -> float:
        return float(self.seconds[-1])

    def index_of(self, h: float) -> int:
        """Index of horizon ``h``; the inverse of ``seconds[i]``."""
        i = int(round(h / self.step)) - 1
        if i < 0 or i >= self.count or abs(self.seconds[i] - h) > 1e-9:
            raise KeyError(f"{h} is not a horizon of this set")
        return i

    @classmethod
    def from_seconds(cls, seconds) -> "HorizonSet":
        """Build from an explicit list; must be the uniform grid (i+1)*step."""
        secs = np.asarray(seconds, dtype=np.float64)
        if secs.ndim != 1 or secs.size == 0:
            raise ValueError("horizon list must be a non-empty 1-D sequence")
        step = float(secs[0])
        hs = cls(step=step, count=int(secs.size))
        if not np.allclose(hs.seconds, secs, rtol=0.0, atol=1e-9):
            raise ValueError("horizons must be uniformly spaced multiples of the first entry")
        return hs
