"""Sliding-window dataset extraction from generated scenarios."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ..core.dataset_io import save_dataset
from ..core.horizons import HorizonSet
from ..core.rng import substream, substream_seed
from ..core.sample import Sample
from ..core.trajectory import ego_anchor, ego_points, to_ego
from .distributions import FUTURE_S, PAST_S, CameraPlacement, ScenarioDistribution
from .render import OutOfViewError, ScenarioRenderer
from .scenario import generate_trajectory


@dataclass
class BuildStats:
    n_vrus: int = 0
    n_scenarios: int = 0
    n_samples: int = 0
    n_excluded_out_of_view: int = 0
    n_scenarios_too_short: int = 0


def window_starts(n_points: int, rate_hz: float, stride: int,
                  past_s: float = PAST_S, future_s: float = FUTURE_S,
                  horizon_count: int = 125) -> list[int]:
    """Indices i0 with at least ``past_s`` of history and a full horizon of
    future: t0 in [past_s, duration - future_s], stepped by ``stride``."""
    first = int(np.ceil(past_s * rate_hz - 1e-9))
    last = n_points - 1 - horizon_count
    if last < first:
        return []
    return list(range(first, last + 1, stride))


def build_dataset(out_dir: str | Path,
                  n_vrus: int,
                  scenarios_per_vru: int = 1,
                  dist: ScenarioDistribution | None = None,
                  seed: int = 0,
                  image_hw: tuple[int, int] = (48, 48),
                  window_stride: int = 1,
                  include_video: bool = True,
                  past_len: int = 50,
                  horizons: HorizonSet | None = None,
                  rate_hz: float = 50.0) -> tuple[Path, BuildStats]:
    """Generate scenarios, extract sliding-window samples, and write the
    dataset directory. Deterministic for a fixed (dist, seed)."""
    if n_vrus < 1:
        raise ValueError("n_vrus must be >= 1")
    dist = dist or ScenarioDistribution()
    horizons = horizons or HorizonSet()
    placement = CameraPlacement(image_hw=image_hw)
    stats = BuildStats(n_vrus=n_vrus)

    samples: list[Sample] = []
    for v in range(n_vrus):
        vru_id = f"vru_{v:04d}"
        for k in range(scenarios_per_vru):
            stream_name = f"scenario/{v}/{k}"
            rng = substream(seed, stream_name)
            spec = dist.sample(rng, seed=substream_seed(seed, stream_name))
            track = generate_trajectory(spec, rate_hz=rate_hz)
            stats.n_scenarios += 1

            starts = window_starts(len(track), rate_hz, window_stride,
                                   horizon_count=horizons.count)
            if not starts:
                warnings.warn(f"scenario {stream_name} too short for one window, skipped")
                stats.n_scenarios_too_short += 1
                continue

            renderers = None
            if include_video:
                cam1, cam2 = placement.place(track, rng)
                renderers = (ScenarioRenderer(track, cam1), ScenarioRenderer(track, cam2))

            for i0 in starts:
                t0 = float(track.timestamps[i0])
                world_past = track.window(t0, past_len)
                anchor = ego_anchor(world_past, t0)
                past = to_ego(world_past, t0, anchor)
                future_world = track.true_positions[i0 + 1: i0 + 1 + horizons.count]
                future = ego_points(future_world, anchor)

                video = flow = None
                occluded = (False, False)
                if renderers is not None:
                    try:
                        video = tuple(r.video_clip(t0) for r in renderers)
                    except OutOfViewError:
                        stats.n_excluded_out_of_view += 1
                        continue
                    flow = tuple(r.flow_clip(t0) for r in renderers)
                    occluded = tuple(r.occluded_in(t0) for r in renderers)

                samples.append(Sample(
                    vru_id=vru_id, t0=t0, past=past,
                    future_gt=_forecast(horizons, future),
                    motion_state=track.labels[i0],
                    video=video, flow=flow, occluded=occluded,
                    anchor_xy=(float(anchor.position[0]), float(anchor.position[1])),
                    anchor_heading=anchor.heading,
                ))

    stats.n_samples = len(samples)
    manifest = save_dataset(samples, out_dir, rate_hz=rate_hz, horizons=horizons)
    return manifest, stats


def _forecast(horizons, positions):
    from ..core.trajectory import ForecastResult
    return ForecastResult(horizons=horizons, positions=positions)
