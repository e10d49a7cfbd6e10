import numpy as np
import pytest
import torch
import torch.nn as nn

from velocast.models import GruConfig, GruForecaster, StreamNet, tiny_stream_spec
from velocast.training import grad_check


def _horizons(n, step=0.25):
    return torch.as_tensor((np.arange(n) + 1) * step, dtype=torch.float64)


class AffineForecaster(nn.Module):
    """Single affine layer: the loss is exactly quadratic in the parameters."""

    def __init__(self, past_len, horizon_count):
        super().__init__()
        self.lin = nn.Linear(past_len * 2, horizon_count * 2)
        self.horizon_count = horizon_count

    def forward(self, past):
        return self.lin(past.flatten(1)).view(-1, self.horizon_count, 2)


class TinyConvForecaster(nn.Module):
    takes_batch_dict = True

    def __init__(self, horizon_count=3):
        super().__init__()
        self.stream = StreamNet(tiny_stream_spec(in_channels=2, clip_len=4))
        self.out = nn.Linear(self.stream.feature_dim, horizon_count * 2)
        self.horizon_count = horizon_count

    def forward(self, batch):
        return self.out(self.stream(batch["OF1"])).view(-1, self.horizon_count, 2)


def test_affine_model_gradients_exact():
    torch.manual_seed(0)
    model = AffineForecaster(past_len=8, horizon_count=4).double()
    batch = {"T": torch.randn(3, 8, 2, dtype=torch.float64),
             "gt": torch.randn(3, 4, 2, dtype=torch.float64)}
    report = grad_check(model, batch, _horizons(4))
    assert report.max_rel_error < 1e-7


def test_tiny_gru_gradients_match_finite_differences():
    torch.manual_seed(1)
    model = GruForecaster(GruConfig(gru_hidden=(4,), mlp_hidden=(8,),
                                    past_len=6, horizon_count=3)).double()
    batch = {"T": torch.randn(2, 6, 2, dtype=torch.float64),
             "gt": torch.randn(2, 3, 2, dtype=torch.float64)}
    report = grad_check(model, batch, _horizons(3))
    assert report.n_params <= 5000
    assert report.max_rel_error < 1e-4, report.worst_param


def test_tiny_conv_stream_gradients_match_finite_differences():
    torch.manual_seed(3)
    model = TinyConvForecaster().double()
    batch = {"OF1": torch.randn(2, 2, 4, 16, 16, dtype=torch.float64),
             "gt": torch.randn(2, 3, 2, dtype=torch.float64)}
    report = grad_check(model, batch, _horizons(3))
    assert report.n_params <= 5000
    assert report.max_rel_error < 1e-4, report.worst_param


def test_gradcheck_rejects_large_or_single_precision_models():
    model = GruForecaster(GruConfig(gru_hidden=(50, 50), mlp_hidden=(100, 100)))
    batch = {"T": torch.randn(1, 50, 2), "gt": torch.randn(1, 125, 2)}
    with pytest.raises(ValueError, match="parameters"):
        grad_check(model.double(), batch, _horizons(125, 0.02))
    small = GruForecaster(GruConfig(gru_hidden=(4,), mlp_hidden=(8,),
                                    past_len=6, horizon_count=3))
    with pytest.raises(ValueError, match="double"):
        grad_check(small, {"T": torch.randn(1, 6, 2), "gt": torch.randn(1, 3, 2)},
                   _horizons(3))
