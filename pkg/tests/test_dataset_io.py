import hashlib
import io
import json

import numpy as np
import pytest

from velocast.core import (
    DatasetFormatError,
    FlowClip,
    ForecastResult,
    Frame,
    HorizonSet,
    MotionState,
    Sample,
    TrajectoryWindow,
    VideoClip,
    dataset_checksum,
    load_dataset,
    read_meta,
    save_dataset,
)
from velocast.core.dataset_io import read_block, write_block


def _make_sample(rng, k, horizons, with_clips=True, hw=12, t=6):
    past_len = 50
    t0 = 1.0 + 0.02 * k
    ts = t0 + 0.02 * np.arange(-(past_len - 1), 1)
    past = TrajectoryWindow(frame=Frame.EGO, timestamps=ts,
                            positions=rng.normal(size=(past_len, 2)))
    gt = ForecastResult(horizons=horizons, positions=rng.normal(size=(len(horizons), 2)))
    video = flow = None
    if with_clips:
        video = (VideoClip(1, rng.random((t, hw, hw), dtype=np.float32)),
                 VideoClip(2, rng.random((t, hw, hw), dtype=np.float32)))
        flow = (FlowClip(1, rng.normal(size=(t - 1, 2, hw, hw)).astype(np.float32)),
                FlowClip(2, rng.normal(size=(t - 1, 2, hw, hw)).astype(np.float32)))
    return Sample(vru_id=f"vru_{k % 3}", t0=t0, past=past, future_gt=gt,
                  motion_state=MotionState.STRAIGHT, video=video, flow=flow,
                  occluded=(k % 2 == 0, False), anchor_xy=(1.0 * k, -2.0),
                  anchor_heading=0.3 * k)


def test_block_roundtrip_bit_exact():
    arr = np.random.default_rng(0).normal(size=(2, 9, 2, 5, 7)).astype(np.float32)
    buf = io.BytesIO()
    write_block(buf, arr)
    buf.seek(0)
    back = read_block(buf, arr.shape)
    assert back.tobytes() == arr.tobytes()


def test_empty_dataset_roundtrip(tmp_path):
    manifest = save_dataset([], tmp_path / "empty")
    meta = read_meta(manifest)
    assert meta.n_samples == 0
    assert load_dataset(manifest) == []


def test_single_sample_roundtrip_bit_identical(tmp_path):
    rng = np.random.default_rng(1)
    hs = HorizonSet(step=0.1, count=8)
    s = _make_sample(rng, 0, hs)
    manifest = save_dataset([s], tmp_path / "one")
    (loaded,) = load_dataset(manifest)
    assert loaded.vru_id == s.vru_id
    assert loaded.motion_state is MotionState.STRAIGHT
    assert loaded.occluded == s.occluded
    assert loaded.anchor_xy == s.anchor_xy
    np.testing.assert_array_equal(
        loaded.past.positions.astype(np.float32), s.past.positions.astype(np.float32))
    np.testing.assert_array_equal(loaded.video[0].frames, s.video[0].frames)
    np.testing.assert_array_equal(loaded.flow[1].frames, s.flow[1].frames)


def test_100_sample_roundtrip_checksums_match(tmp_path):
    rng = np.random.default_rng(2)
    hs = HorizonSet(step=0.25, count=10)
    samples = [_make_sample(rng, k, hs, hw=8, t=4) for k in range(100)]
    manifest = save_dataset(samples, tmp_path / "d1")
    meta = read_meta(manifest)

    # Re-save the loaded dataset: every tensor file must be byte-identical.
    loaded = load_dataset(manifest)
    manifest2 = save_dataset(loaded, tmp_path / "d2")
    for rec1, rec2 in zip(meta.records, read_meta(manifest2).records):
        assert rec1["sha256"] == rec2["sha256"]
        raw = (tmp_path / "d1" / rec1["file"]).read_bytes()
        assert hashlib.sha256(raw).hexdigest() == rec1["sha256"]
    assert dataset_checksum(manifest) == dataset_checksum(manifest)


def test_clipless_dataset(tmp_path):
    rng = np.random.default_rng(3)
    hs = HorizonSet(step=0.1, count=5)
    samples = [_make_sample(rng, k, hs, with_clips=False) for k in range(4)]
    manifest = save_dataset(samples, tmp_path / "nc")
    loaded = load_dataset(manifest)
    assert all(not s.has_clips for s in loaded)


def test_load_clips_false_skips_payloads(tmp_path):
    rng = np.random.default_rng(4)
    hs = HorizonSet(step=0.1, count=5)
    manifest = save_dataset([_make_sample(rng, 0, hs)], tmp_path / "d")
    (s,) = load_dataset(manifest, load_clips=False)
    assert s.video is None and s.flow is None


def test_missing_tensor_file_raises(tmp_path):
    rng = np.random.default_rng(5)
    hs = HorizonSet(step=0.1, count=5)
    manifest = save_dataset([_make_sample(rng, k, hs) for k in range(2)], tmp_path / "d")
    (tmp_path / "d" / "sample_00001.bin").unlink()
    with pytest.raises(DatasetFormatError, match="missing tensor file"):
        load_dataset(manifest)


def test_shape_mismatch_against_manifest_raises(tmp_path):
    rng = np.random.default_rng(6)
    hs = HorizonSet(step=0.1, count=5)
    manifest = save_dataset([_make_sample(rng, 0, hs)], tmp_path / "d")
    raw = json.loads(manifest.read_text())
    raw["past_len"] = 49
    manifest.write_text(json.dumps(raw))
    with pytest.raises(DatasetFormatError, match="manifest-declared"):
        load_dataset(manifest)


def test_schema_mismatch_raises(tmp_path):
    rng = np.random.default_rng(7)
    hs = HorizonSet(step=0.1, count=5)
    manifest = save_dataset([_make_sample(rng, 0, hs)], tmp_path / "d")
    raw = json.loads(manifest.read_text())
    del raw["rate_hz"]
    manifest.write_text(json.dumps(raw))
    with pytest.raises(DatasetFormatError, match="missing keys"):
        load_dataset(manifest)


def test_corrupt_magic_raises(tmp_path):
    rng = np.random.default_rng(8)
    hs = HorizonSet(step=0.1, count=5)
    manifest = save_dataset([_make_sample(rng, 0, hs)], tmp_path / "d")
    f = tmp_path / "d" / "sample_00000.bin"
    data = bytearray(f.read_bytes())
    data[:4] = b"JUNK"
    f.write_bytes(bytes(data))
    with pytest.raises(DatasetFormatError, match="magic"):
        load_dataset(manifest)
