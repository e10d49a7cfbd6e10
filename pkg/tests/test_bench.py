import pytest
import torch

from velocast.evaluation import runtime_bench
from velocast.models import GruConfig, GruForecaster


def test_single_iteration_stats_equal_the_measurement():
    torch.manual_seed(0)
    model = GruForecaster(GruConfig(gru_hidden=(8,), mlp_hidden=(8,), horizon_count=4))
    batch = {"T": torch.randn(1, 50, 2)}
    res = runtime_bench(model, batch, n_warmup=1, n_iter=1)
    assert res.median_ms == res.p95_ms > 0.0
    assert res.n_iter == 1
    assert "torch" in res.hardware


def test_bench_rejects_zero_iterations():
    model = GruForecaster(GruConfig(gru_hidden=(8,), mlp_hidden=(8,), horizon_count=4))
    with pytest.raises(ValueError):
        runtime_bench(model, {"T": torch.randn(1, 50, 2)}, n_iter=0)
