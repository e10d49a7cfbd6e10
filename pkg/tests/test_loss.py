import numpy as np
import pytest
import torch
from hypothesis import given, settings
from hypothesis import strategies as st

from velocast.core import ForecastResult, HorizonSet
from velocast.training import forecast_loss, horizon_loss


def _loss(gt, pred, horizons):
    return float(horizon_loss(torch.as_tensor(gt, dtype=torch.float64)[None],
                              torch.as_tensor(pred, dtype=torch.float64)[None],
                              torch.as_tensor(horizons, dtype=torch.float64)))


def test_perfect_forecast_gives_zero():
    hs = HorizonSet()
    gt = np.random.default_rng(0).normal(size=(125, 2))
    assert _loss(gt, gt, hs.seconds) == 0.0


def test_hand_value_single_meter_error_at_one_second():
    hs = HorizonSet()
    gt = np.zeros((125, 2))
    pred = np.zeros((125, 2))
    pred[hs.index_of(1.0), 0] = 1.0  # 1 m error at h = 1.0 s, zero elsewhere
    assert _loss(gt, pred, hs.seconds) == pytest.approx((1.0 / 1.0) / 125.0, abs=1e-15)
    assert _loss(gt, pred, hs.seconds) == pytest.approx(0.008, abs=1e-12)


def test_hand_value_two_horizons():
    horizons = np.array([0.5, 1.0])
    gt = np.zeros((2, 2))
    pred = np.tile([0.3, 0.4], (2, 1))  # squared error 0.25 at both horizons
    assert _loss(gt, pred, horizons) == pytest.approx(0.375, abs=1e-15)
    assert _loss(gt, pred, horizons) == 0.5 * (0.25 / 0.5 + 0.25 / 1.0)


def test_symmetric_under_xy_swap():
    horizons = np.array([0.5, 1.0, 1.5])
    rng = np.random.default_rng(1)
    gt = rng.normal(size=(3, 2))
    pred = rng.normal(size=(3, 2))
    assert _loss(gt, pred, horizons) == pytest.approx(
        _loss(gt[:, [1, 0]], pred[:, [1, 0]], horizons), abs=1e-15)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**31 - 1), st.floats(0.1, 10.0))
def test_scaling_errors_by_c_scales_loss_by_c_squared(seed, c):
    rng = np.random.default_rng(seed)
    horizons = (np.arange(6) + 1) * 0.25
    gt = rng.normal(size=(6, 2))
    err = rng.normal(size=(6, 2))
    base = _loss(gt, gt + err, horizons)
    scaled = _loss(gt, gt + c * err, horizons)
    assert base >= 0.0
    assert scaled == pytest.approx(c * c * base, rel=1e-9)


def test_zero_iff_equal():
    horizons = np.array([1.0])
    gt = np.array([[1.0, 2.0]])
    assert _loss(gt, gt, horizons) == 0.0
    assert _loss(gt, gt + 1e-6, horizons) > 0.0


def test_forecast_loss_requires_matching_horizon_sets():
    a = ForecastResult(horizons=HorizonSet(step=0.5, count=2), positions=np.zeros((2, 2)))
    b = ForecastResult(horizons=HorizonSet(step=0.5, count=3), positions=np.zeros((3, 2)))
    with pytest.raises(ValueError, match="horizon"):
        forecast_loss(a, b)
    ok = forecast_loss(a, ForecastResult(horizons=a.horizons,
                                         positions=np.ones((2, 2))))
    assert ok == pytest.approx(0.5 * (2.0 / 0.5 + 2.0 / 1.0))
