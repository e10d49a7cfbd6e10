from .ablation import ResultsLockedError, build_model, run_ablation, safe_name
from .manifest import (
    DEFAULT_TRAIN,
    ExperimentManifest,
    ManifestError,
    default_manifest,
    variant_config,
)
from .report import MissingArtifactsError, generate_report

__all__ = [
    "ResultsLockedError", "build_model", "run_ablation", "safe_name",
    "DEFAULT_TRAIN", "ExperimentManifest", "ManifestError", "default_manifest",
    "variant_config", "MissingArtifactsError", "generate_report",
]
