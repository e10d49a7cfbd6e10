from .horizons import HorizonSet
from .sample import FlowClip, MotionState, Sample, VideoClip
from .trajectory import (
    AnchorPose,
    DegenerateHeadingError,
    ForecastResult,
    Frame,
    TrajectoryWindow,
    ego_anchor,
    ego_points,
    from_ego,
    to_ego,
)
from .dataset_io import (
    DatasetFormatError,
    DatasetMeta,
    dataset_checksum,
    load_dataset,
    read_meta,
    save_dataset,
)

__all__ = [
    "HorizonSet", "FlowClip", "MotionState", "Sample", "VideoClip",
    "AnchorPose", "DegenerateHeadingError", "ForecastResult", "Frame",
    "TrajectoryWindow", "ego_anchor", "ego_points", "from_ego", "to_ego",
    "DatasetFormatError", "DatasetMeta", "dataset_checksum", "load_dataset",
    "read_meta", "save_dataset",
]
