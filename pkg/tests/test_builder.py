import numpy as np
import pytest

from velocast.core import MotionState, dataset_checksum, load_dataset, read_meta
from velocast.synthgen import ScenarioDistribution, ScenarioSpec, Segment, build_dataset
from velocast.synthgen.builder import window_starts


class FixedDistribution(ScenarioDistribution):
    """Always yields the same spec; duck-typed stand-in for tests."""

    def __init__(self, spec):
        object.__setattr__(self, "_spec", spec)

    def sample(self, rng, seed):
        return self._spec


def _straight_10s():
    return ScenarioSpec(motion_script=(Segment(MotionState.STRAIGHT, 10.0),),
                        cruise_speed=2.0, noise_std=0.0)


def test_window_count_matches_arithmetic_oracle(tmp_path):
    # floor((10 - 3.5) * 50) + 1 windows for a 10 s scenario at 50 Hz.
    manifest, stats = build_dataset(tmp_path / "d", n_vrus=1,
                                    dist=FixedDistribution(_straight_10s()),
                                    include_video=False)
    expected = int(np.floor((10.0 - 3.5) * 50)) + 1
    assert expected == 326
    assert stats.n_samples == 326
    assert read_meta(manifest).n_samples == 326


def test_window_starts_stride_and_too_short():
    assert len(window_starts(501, 50.0, 1)) == 326
    assert len(window_starts(501, 50.0, 50)) == 7
    assert window_starts(100, 50.0, 1) == []


def test_too_short_scenario_warns_and_skips(tmp_path):
    short = ScenarioSpec(motion_script=(Segment(MotionState.WAIT, 2.0),), noise_std=0.0)
    with pytest.warns(UserWarning, match="too short"):
        manifest, stats = build_dataset(tmp_path / "d", n_vrus=1,
                                        dist=FixedDistribution(short),
                                        include_video=False)
    assert stats.n_samples == 0
    assert stats.n_scenarios_too_short == 1


def test_fixed_seed_gives_byte_identical_datasets(tmp_path):
    kw = dict(n_vrus=2, seed=9, image_hw=(16, 16), window_stride=50)
    m1, _ = build_dataset(tmp_path / "a", **kw)
    m2, _ = build_dataset(tmp_path / "b", **kw)
    r1, r2 = read_meta(m1).records, read_meta(m2).records
    assert [r["sha256"] for r in r1] == [r["sha256"] for r in r2]
    assert dataset_checksum(m1) == dataset_checksum(m2)


def test_samples_have_ego_past_and_aligned_clips(tmp_path):
    manifest, stats = build_dataset(tmp_path / "d", n_vrus=1, seed=3,
                                    image_hw=(24, 24), window_stride=100)
    samples = load_dataset(manifest)
    assert stats.n_samples == len(samples) > 0
    for s in samples:
        # Ego convention: current position is the origin.
        np.testing.assert_allclose(s.past.positions[-1], 0.0, atol=1e-9)
        assert s.video[0].frames.shape == (10, 24, 24)
        assert s.flow[1].frames.shape == (9, 2, 24, 24)
        assert len(s.future_gt.positions) == 125


def test_default_distribution_wait_fraction_near_half(tmp_path):
    manifest, stats = build_dataset(tmp_path / "d", n_vrus=200, seed=0,
                                    include_video=False, window_stride=25)
    meta = read_meta(manifest)
    states = [r["motion_state"] for r in meta.records]
    frac = states.count("wait") / len(states)
    assert 0.45 <= frac <= 0.55, f"wait fraction {frac}"


def test_vru_grouping(tmp_path):
    manifest, _ = build_dataset(tmp_path / "d", n_vrus=3, scenarios_per_vru=2,
                                include_video=False, window_stride=100, seed=1)
    meta = read_meta(manifest)
    assert {r["vru_id"] for r in meta.records} == {"vru_0000", "vru_0001", "vru_0002"}
