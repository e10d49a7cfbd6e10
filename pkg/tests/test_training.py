import numpy as np
import pytest
import torch

from velocast.core import ForecastResult, Frame, HorizonSet, MotionState, Sample, TrajectoryWindow
from velocast.models import GruConfig, GruForecaster
from velocast.training import TrainConfig, split_by_vru, train
from velocast.training.sweep import SweepPoint, default_grid, run_sweep

HS = HorizonSet(step=0.1, count=10)


def _sample(rng, vru="vru_0000", t0=1.0):
    past_len = 50
    ts = t0 + 0.02 * np.arange(-(past_len - 1), 1)
    past = TrajectoryWindow(frame=Frame.EGO, timestamps=ts,
                            positions=np.cumsum(rng.normal(size=(past_len, 2)), axis=0) * 0.01)
    gt = ForecastResult(horizons=HS, positions=rng.normal(size=(10, 2)))
    return Sample(vru_id=vru, t0=t0, past=past, future_gt=gt,
                  motion_state=MotionState.STRAIGHT)


def _dataset(n, n_vrus=5, seed=0):
    rng = np.random.default_rng(seed)
    return [_sample(rng, vru=f"vru_{k % n_vrus:04d}", t0=1.0 + 0.02 * k)
            for k in range(n)]


def _gru(seed=0):
    torch.manual_seed(seed)
    return GruForecaster(GruConfig(gru_hidden=(8,), mlp_hidden=(16,), horizon_count=10))


def test_split_by_vru_is_disjoint_partition():
    samples = _dataset(200, n_vrus=20)
    splits = split_by_vru(samples, (0.7, 0.15, 0.15), seed=3)
    ids = {k: {s.vru_id for s in v} for k, v in splits.items()}
    assert ids["train"] & ids["val"] == set()
    assert ids["train"] & ids["test"] == set()
    assert ids["val"] & ids["test"] == set()
    assert len(ids["train"] | ids["val"] | ids["test"]) == 20
    assert sum(len(v) for v in splits.values()) == 200


def test_overfit_single_sample():
    sample = _dataset(1)
    model = _gru(1)
    cfg = TrainConfig(batch_size=1, learning_rate=2e-2, max_epochs=200,
                      patience=200, seed=1)
    result = train(model, sample, [], cfg)
    losses = [r.train_loss for r in result.history]
    assert losses[-1] < 1e-3
    # Decreasing on average: late mean well below early mean.
    assert np.mean(losses[-50:]) < 0.1 * np.mean(losses[:50])


def test_zero_learning_rate_leaves_parameters_unchanged():
    data = _dataset(8)
    model = _gru(2)
    before = {k: v.clone() for k, v in model.state_dict().items()}
    cfg = TrainConfig(batch_size=4, learning_rate=0.0, max_epochs=3, seed=0)
    result = train(model, data, data, cfg)
    for k, v in model.state_dict().items():
        assert torch.equal(before[k], v), k
    losses = [r.train_loss for r in result.history]
    assert losses[0] == pytest.approx(losses[-1], rel=1e-12)


def test_fixed_seed_reproduces_loss_curve():
    data = _dataset(24)
    curves = []
    for _ in range(2):
        model = _gru(7)
        cfg = TrainConfig(batch_size=8, learning_rate=1e-3, max_epochs=5, seed=13)
        result = train(model, data[:16], data[16:], cfg)
        curves.append([(r.train_loss, r.val_loss) for r in result.history])
    assert curves[0] == curves[1]


def test_best_checkpoint_invariant_and_log(tmp_path):
    data = _dataset(30)
    model = _gru(3)
    cfg = TrainConfig(batch_size=8, learning_rate=3e-3, max_epochs=12, patience=4, seed=2)
    log = tmp_path / "train.log"
    result = train(model, data[:20], data[20:], cfg, log_path=log)
    vals = [r.val_loss for r in result.history]
    assert result.best_val == min(vals)
    assert result.best_val <= vals[-1]
    lines = log.read_text().strip().splitlines()
    assert len(lines) == len(result.history)
    epoch, train_loss, val_loss, wall = lines[0].split(",")
    assert int(epoch) == 0 and float(val_loss) == pytest.approx(vals[0])


def test_non_finite_loss_aborts_with_diagnostic():
    data = _dataset(8)
    model = _gru(4)
    with torch.no_grad():
        model.out.weight.fill_(float("inf"))
    cfg = TrainConfig(batch_size=4, learning_rate=1e-3, max_epochs=2, seed=0)
    with pytest.raises(RuntimeError, match="non-finite loss .* batch 0 .* epoch 0"):
        train(model, data, data, cfg)


def test_sweep_single_point_wins(tmp_path):
    data = _dataset(20)
    grid = [SweepPoint((4,), (8,), 8, 1e-3)]
    rows = run_sweep(data[:14], data[14:], grid,
                     TrainConfig(max_epochs=2, seed=5),
                     out_path=tmp_path / "sweep.tsv", horizon_count=10)
    assert len(rows) == 1 and rows[0].best
    text = (tmp_path / "sweep.tsv").read_text()
    assert "gru_layers" in text and "*" in text


def test_sweep_duplicate_points_get_identical_scores():
    data = _dataset(20)
    p = SweepPoint((4,), (8,), 8, 1e-3)
    rows = run_sweep(data[:14], data[14:], [p, p],
                     TrainConfig(max_epochs=3, seed=9), horizon_count=10)
    assert rows[0].val_loss == rows[1].val_loss


def test_default_grid_has_144_combinations():
    grid = default_grid()
    assert len(grid) == 4 * 4 * 3 * 3 == 144
    assert SweepPoint((50, 50), (100, 100), 5000, 1e-4) in grid
