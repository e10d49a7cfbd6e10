"""velocast: cyclist trajectory forecasting with multi-camera video fusion
on synthetic scenes, plus the evaluation and significance-testing pipeline."""

__version__ = "0.1.0"
