from .checkpoint import load_checkpoint, save_checkpoint
from .gru import GruConfig, GruForecaster, mlp_stack
from .msnet import (
    HEADLINE_VARIANTS,
    STREAM_KEYS,
    VARIANT_MASKS,
    MotionSequenceNet,
    MsNetConfig,
    analytic_parameter_count,
)
from .streams import (
    InceptionBlock3dSpec,
    StreamConfigError,
    StreamNet,
    StreamSpec,
    plan_layers,
    stream_parameter_count,
    tiny_stream_spec,
)

__all__ = [
    "load_checkpoint", "save_checkpoint", "GruConfig", "GruForecaster",
    "mlp_stack", "HEADLINE_VARIANTS", "STREAM_KEYS", "VARIANT_MASKS",
    "MotionSequenceNet", "MsNetConfig", "analytic_parameter_count",
    "InceptionBlock3dSpec", "StreamConfigError", "StreamNet", "StreamSpec",
    "plan_layers", "stream_parameter_count", "tiny_stream_spec",
]
