from .builder import BuildStats, build_dataset, window_starts
from .camera import CameraModel
from .distributions import CameraPlacement, ScenarioDistribution
from .render import (
    OutOfViewError,
    ScenarioRenderer,
    ground_truth_flow,
    is_occluded,
    render_clip,
    static_background,
)
from .scenario import ScenarioSpec, ScenarioTrack, Segment, generate_trajectory

__all__ = [
    "BuildStats", "build_dataset", "window_starts", "CameraModel",
    "CameraPlacement", "ScenarioDistribution", "OutOfViewError",
    "ScenarioRenderer", "ground_truth_flow", "is_occluded", "render_clip",
    "static_background", "ScenarioSpec", "ScenarioTrack", "Segment",
    "generate_trajectory",
]
