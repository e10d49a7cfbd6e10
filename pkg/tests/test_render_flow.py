import math

import numpy as np
import pytest

from velocast.core import MotionState
from velocast.synthgen import (
    CameraModel,
    ScenarioRenderer,
    ScenarioSpec,
    Segment,
    generate_trajectory,
    ground_truth_flow,
    render_clip,
    static_background,
)

from flow_oracles import block_match, warp_error

HW = (48, 48)


def _camera(cid=1, scale=0.25, view=0.0, pos=(0.0, 0.0)):
    return CameraModel(camera_id=cid, position=pos, view_dir=view,
                       image_hw=HW, scale_m_per_px=scale)


def _track(script, **kw):
    kw.setdefault("noise_std", 0.0)
    return generate_trajectory(ScenarioSpec(motion_script=tuple(script), **kw))


def test_wait_clip_frames_are_pixel_identical():
    track = _track([Segment(MotionState.WAIT, 4.0)])
    clip = render_clip(track, _camera(), t0=2.0)
    assert clip.frames.shape == (10, *HW)
    for k in range(1, 10):
        np.testing.assert_array_equal(clip.frames[k], clip.frames[0])


def test_occlusion_blanks_glyph_in_affected_camera_only():
    base = dict(cruise_speed=2.0, start_xy=(-2.0, 0.0))
    occluded = _track([Segment(MotionState.STRAIGHT, 4.0)],
                      occlusion=(((0.0, 10.0),), ()), **base)
    cam1, cam2 = _camera(1), _camera(2, view=math.pi / 2)
    clip1 = render_clip(occluded, cam1, t0=1.5)
    clip2 = render_clip(occluded, cam2, t0=1.5)
    bg1 = static_background(cam1, occluded.spec.seed)
    bg2 = static_background(cam2, occluded.spec.seed)
    np.testing.assert_array_equal(clip1.frames, np.tile(bg1, (10, 1, 1)))
    assert np.abs(clip2.frames - bg2).max() > 0.2


def test_straight_centroid_displacement_matches_speed():
    speed, scale = 2.0, 0.25
    track = _track([Segment(MotionState.STRAIGHT, 4.0)], cruise_speed=speed,
                   start_xy=(-3.0, 0.0))
    cam = _camera(scale=scale)
    clip = render_clip(track, cam, t0=2.0)
    bg = static_background(cam, track.spec.seed)
    centroids = []
    for fr in clip.frames:
        w = np.clip(fr - bg, 0.0, None)
        vv, uu = np.mgrid[0:HW[0], 0:HW[1]]
        centroids.append((float((uu * w).sum() / w.sum()),
                          float((vv * w).sum() / w.sum())))
    expected = speed * 0.1 / scale  # px per clip frame
    for (u0, v0), (u1, v1) in zip(centroids[:-1], centroids[1:]):
        step = math.hypot(u1 - u0, v1 - v0)
        assert abs(step - expected) < 1.0


def test_out_of_view_flagged():
    track = _track([Segment(MotionState.STRAIGHT, 6.0)], cruise_speed=4.0,
                   start_xy=(0.0, 0.0))
    cam = _camera(scale=0.2)  # 9.6 m view; cyclist leaves it
    from velocast.synthgen import OutOfViewError
    with pytest.raises(OutOfViewError):
        render_clip(track, cam, t0=5.0)


def test_wait_flow_is_all_zero():
    track = _track([Segment(MotionState.WAIT, 4.0)])
    flow = ground_truth_flow(track, _camera(), t0=2.0)
    assert flow.frames.shape == (9, 2, *HW)
    np.testing.assert_array_equal(flow.frames, 0.0)


def test_straight_flow_carries_projected_velocity_on_glyph_pixels():
    speed, view = 2.0, 0.6
    track = _track([Segment(MotionState.STRAIGHT, 4.0)], cruise_speed=speed,
                   start_heading=0.4, start_xy=(-2.5, -1.5))
    cam = _camera(scale=0.25, view=view)
    flow = ground_truth_flow(track, cam, t0=2.0)
    p = track.positions[track.index_at(2.0)]
    vel = speed * np.array([math.cos(0.4), math.sin(0.4)])
    expected = (cam.world_to_pixel((p + 0.1 * vel)[None, :])
                - cam.world_to_pixel(p[None, :]))[0]
    for k in range(9):
        du, dv = flow.frames[k]
        m = (du != 0) | (dv != 0)
        assert 20 < m.sum() < 500
        np.testing.assert_allclose(du[m], expected[0], atol=1e-6)
        np.testing.assert_allclose(dv[m], expected[1], atol=1e-6)


def test_backward_warp_reconstructs_next_frame_on_glyph_pixels():
    # Turning scenario with an active head cue: rotation plus cue motion.
    track = _track([
        Segment(MotionState.STRAIGHT, 2.0),
        Segment(MotionState.LEFT, 3.0),
        Segment(MotionState.STRAIGHT, 1.5),
    ], cruise_speed=2.0, turn_radius=3.5, cue_lead_time=0.8, start_xy=(-2.0, -2.0))
    cam = _camera(scale=0.3)
    r = ScenarioRenderer(track, cam)
    for t0 in (1.6, 2.4, 3.6, 4.8):
        idx = r.clip_indices(t0)
        for a, b in zip(idx[:-1], idx[1:]):
            fa, fb = r.frame(a), r.frame(b)
            mask = r._glyph(a).any_px
            if not mask.any():
                continue
            err = warp_error(fa, fb, r.flow(a, b), mask)
            assert err < 0.05, f"warp MAE {err} at t0={t0}"


def test_block_matching_estimator_agrees_with_analytic_flow():
    track = _track([Segment(MotionState.STRAIGHT, 4.0)], cruise_speed=3.0,
                   start_xy=(-4.0, 0.0))
    cam = _camera(scale=0.25)
    r = ScenarioRenderer(track, cam)
    i, j = r.clip_indices(2.0)[4:6]
    bg = static_background(cam, track.spec.seed)
    # Match on background-subtracted frames so the static texture does not
    # anchor edge patches at zero displacement.
    fa, fb = r.frame(i) - bg, r.frame(j) - bg
    flow = r.flow(i, j)
    mask = r._glyph(i).any_px
    vv, uu = np.nonzero(mask)
    # Probe textured glyph pixels away from the borders; flat interior patches
    # are ambiguous for matching (aperture problem).
    probes = [(u, v) for u, v in zip(uu, vv)
              if 8 <= u < HW[1] - 8 and 8 <= v < HW[0] - 8
              and fa[v - 3: v + 4, u - 3: u + 4].std() > 0.05][:12]
    assert len(probes) >= 5
    est = np.array([block_match(fa, fb, u, v) for u, v in probes], dtype=float)
    want = np.array([[flow[0, v, u], flow[1, v, u]] for u, v in probes])
    # Integer-pixel matches: the median estimate lands within one pixel.
    np.testing.assert_allclose(np.median(est, axis=0), np.median(want, axis=0), atol=0.75)


def test_cue_moves_head_dot_laterally():
    lead = 0.8
    script = [Segment(MotionState.STRAIGHT, 3.0), Segment(MotionState.LEFT, 2.0),
              Segment(MotionState.STRAIGHT, 1.0)]
    with_cue = _track(script, cue_lead_time=lead, start_xy=(-2.0, -1.0))
    without = _track(script, cue_lead_time=0.0, start_xy=(-2.0, -1.0))
    cam = _camera(scale=0.3)
    t_pre = 2.8  # inside the cue window, before the bend
    fr_cue = ScenarioRenderer(with_cue, cam).frame(with_cue.index_at(t_pre))
    fr_plain = ScenarioRenderer(without, cam).frame(without.index_at(t_pre))
    assert np.abs(fr_cue - fr_plain).max() > 0.2
    # Before the cue window the two renders agree exactly.
    i_early = with_cue.index_at(1.0)
    np.testing.assert_array_equal(ScenarioRenderer(with_cue, cam).frame(i_early),
                                  ScenarioRenderer(without, cam).frame(i_early))
