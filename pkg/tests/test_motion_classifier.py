import numpy as np

from velocast.core import MotionState
from velocast.evaluation import label_motion_states
from velocast.synthgen import ScenarioSpec, Segment, generate_trajectory


def test_threshold_classifier_recovers_generator_labels_in_segment_interiors():
    spec = ScenarioSpec(motion_script=(
        Segment(MotionState.WAIT, 3.0),
        Segment(MotionState.START, 1.5),
        Segment(MotionState.STRAIGHT, 3.0),
        Segment(MotionState.LEFT, 3.0),
        Segment(MotionState.STRAIGHT, 3.0),
        Segment(MotionState.RIGHT, 3.0),
        Segment(MotionState.STOP, 1.5),
        Segment(MotionState.WAIT, 3.0),
    ), cruise_speed=2.25, accel=1.5, turn_radius=4.0, noise_std=0.0)
    track = generate_trajectory(spec)
    labels = label_motion_states(track.window(float(track.timestamps[-1]), len(track)))

    def at(t):
        return labels[track.index_at(t)]

    assert at(1.5) is MotionState.WAIT
    assert at(3.6) is MotionState.START
    assert at(6.0) is MotionState.STRAIGHT
    assert at(9.0) is MotionState.LEFT
    assert at(12.1) is MotionState.STRAIGHT
    assert at(15.0) is MotionState.RIGHT
    assert at(19.5) is MotionState.WAIT


def test_classifier_all_standing():
    spec = ScenarioSpec(motion_script=(Segment(MotionState.WAIT, 4.0),), noise_std=0.0)
    track = generate_trajectory(spec)
    labels = label_motion_states(track.window(4.0, len(track)))
    assert all(lab is MotionState.WAIT for lab in labels)
