import dataclasses

import numpy as np
import pytest

from src.domain.entities.enums import DecoderKind, PrimitiveAction
from src.domain.entities.flow import DecoderParams, DominantVectors, FlowField
from src.domain.entities.frame import Frame
from src.domain.entities.video import Video
from src.domain.services.action_decoder import (
    calibrate, classify_mean, decode_action, keypoint_decode, keypoint_mean, label_video, labeling_accuracy,
    pair_mean, turn_sign_consistency
)
from src.domain.services.maze_generator import generate_maze
from src.domain.services.optical_flow import (
    block_match_flow, consistent_flow, dominant_subset, filter_dominant, flow_shift_agreement
)
from src.domain.services.roamer import roam

F, L, R = PrimitiveAction.MOVE_FORWARD, PrimitiveAction.TURN_LEFT, PrimitiveAction.TURN_RIGHT


def shifted(frame: Frame, dx: int) -> Frame:
    return Frame(np.roll(frame.pixels, dx, axis=1))


def dominant(*vectors) -> DominantVectors:
    array = np.asarray(vectors, dtype=np.float64)
    return DominantVectors(vectors=array, indices=np.arange(len(array)), threshold=0.0)


@pytest.fixture
def fast_params():
    return DecoderParams(tau_x=2.0, tau_y=4.0, block_size=4, search_radius=6, search_radius_y=2)


def test_identical_frames_give_zero_flow(textured_frame):
    field = block_match_flow(textured_frame, textured_frame, block_size=8, search_radius=6)
    assert field.grid_shape == (8, 8)
    assert not field.vectors.any()


def test_known_shift_is_recovered(textured_frame):
    field = block_match_flow(textured_frame, shifted(textured_frame, 3), block_size=8, search_radius=6)
    assert flow_shift_agreement(field, (3, 0)) == 1.0


def test_flow_saturates_at_search_window(textured_frame):
    field = block_match_flow(textured_frame, shifted(textured_frame, 8), block_size=8, search_radius=6)
    assert np.abs(field.vectors).max() <= 6


def test_flow_rejects_mismatched_frames(textured_frame):
    other = Frame(np.zeros((32, 32)))
    with pytest.raises(ValueError):
        block_match_flow(textured_frame, other)


def test_flow_rejects_small_blocks(textured_frame):
    with pytest.raises(ValueError):
        block_match_flow(textured_frame, textured_frame, block_size=3)


def test_consistency_check_drops_blocks_that_leave_the_view(textured_frame):
    """Shift right by 16 with fresh content entering on the left."""
    pixels = np.empty((64, 64))
    pixels[:, 16:] = textured_frame.pixels[:, :48]
    pixels[:, :16] = np.random.default_rng(5).random((64, 16))
    moved = Frame.from_intensities(pixels)
    field = consistent_flow(textured_frame, moved, block_size=8, search_radius=20, search_radius_y=2)
    assert field.valid[:, :6].all()
    assert not field.valid[:, 6:].any()
    assert np.all(field.vectors[:, :6] == (16, 0))
    dom = filter_dominant(field)
    assert np.all(dom.vectors == (16, 0))
    assert set(dom.indices % 8) <= set(range(6))


def test_filter_dominant_ignores_invalid_blocks():
    vectors = np.zeros((2, 2, 2), dtype=np.int64)
    vectors[0, 0] = (9, 0)
    vectors[1, 1] = (2, 0)
    valid = np.array([[False, True], [True, True]])
    field = FlowField(vectors, 4, 6, 6, 8, 8, valid=valid)
    dom = filter_dominant(field)
    assert dom.vectors.tolist() == [[2, 0]]
    assert dom.indices.tolist() == [3]


def test_filter_dominant_falls_back_to_the_whole_field():
    vectors = np.zeros((2, 2, 2), dtype=np.int64)
    vectors[0, 1] = (5, 0)
    field = FlowField(vectors, 4, 6, 6, 8, 8, valid=np.zeros((2, 2), dtype=bool))
    dom = filter_dominant(field)
    assert dom.vectors.tolist() == [[5, 0]]
    assert dom.indices.tolist() == [1]


def test_dominant_keeps_top_magnitude():
    vectors = np.array([[i, 0] for i in range(1, 11)])
    dom = dominant_subset(vectors)
    assert dom.vectors.tolist() == [[10, 0]]


def test_dominant_keeps_all_of_a_zero_field():
    dom = dominant_subset(np.zeros((12, 2), dtype=np.int64))
    assert len(dom) == 12


def test_dominant_upper_decile_of_hundred():
    vectors = np.array([[0, i] for i in range(1, 101)])
    dom = dominant_subset(vectors)
    assert dom.vectors[:, 1].min() == 91
    assert len(dom) == 10


def test_dominant_keeps_ties():
    vectors = np.array([[1, 0]] * 8 + [[0, 5], [5, 0]])
    assert len(dominant_subset(vectors)) == 2


def test_dominant_rejects_empty():
    with pytest.raises(ValueError):
        dominant_subset(np.zeros((0, 2)))


@pytest.mark.parametrize("mean, expected", [
    ((8.0, 0.0), L),
    ((-8.0, 0.0), R),
    ((0.5, -0.3), F),
    ((8.0, 6.0), F),
])
def test_decode_action_rule(mean, expected):
    params = DecoderParams(tau_x=2.0, tau_y=4.0)
    assert decode_action(dominant(mean, mean), params) is expected


def test_decode_action_uses_the_mean():
    params = DecoderParams(tau_x=2.0, tau_y=4.0)
    assert decode_action(dominant((1.0, -0.6), (0.0, 0.0)), params) is F
    assert classify_mean(2.0, 0.0, 2.0, 4.0) is F


def test_decoder_params_need_positive_thresholds():
    with pytest.raises(ValueError):
        DecoderParams(tau_x=0.0)


def test_keypoint_decoder_identical_frames(textured_frame):
    result = keypoint_decode(textured_frame, textured_frame, DecoderParams(tau_x=2.0, kind=DecoderKind.MATCHING))
    assert result.action is F
    assert not result.low_confidence


def test_keypoint_decoder_detects_left_turn(textured_frame):
    """Flat side bands keep every corner far enough from the edge to be matched."""
    pixels = textured_frame.pixels.copy()
    pixels[:, :12] = 128 / 255
    pixels[:, 45:] = 128 / 255
    frame = Frame(pixels)
    params = DecoderParams(tau_x=2.0, kind=DecoderKind.MATCHING, search_radius=6, search_radius_y=2)
    result = keypoint_decode(frame, shifted(frame, 3), params)
    assert result.action is L
    assert result.n_corners >= 4


def test_keypoint_decoder_flat_frames_are_low_confidence():
    flat = Frame(np.full((32, 32), 128 / 255))
    result = keypoint_decode(flat, flat, DecoderParams(kind=DecoderKind.MATCHING))
    assert result.action is F
    assert result.low_confidence


def test_label_video_emits_one_action_per_pair(tiny_maze, fast_params):
    video = roam(tiny_maze, seed=1, steps=10, width=16, height=16)
    labeled = label_video(video, fast_params)
    assert len(labeled.pseudo_actions) == 9
    assert PrimitiveAction.STOP not in labeled.pseudo_actions
    assert labeled.success_objects == video.success_objects


def test_label_video_is_deterministic_across_workers(tiny_maze, fast_params):
    video = roam(tiny_maze, seed=1, steps=10, width=16, height=16)
    assert label_video(video, fast_params).pseudo_actions == label_video(video, fast_params, workers=3).pseudo_actions


def test_labeling_accuracy():
    assert labeling_accuracy([F, L, R, F], [F, L, L, F]) == 0.75
    with pytest.raises(ValueError):
        labeling_accuracy([F], [F, L])


def test_turn_sign_consistency():
    assert turn_sign_consistency([F, L, R], [F, L, L]) == 0.5
    assert turn_sign_consistency([F, F], [F, F]) == 1.0


def test_calibration_picks_a_grid_point(tiny_maze, fast_params):
    video = roam(tiny_maze, seed=2, steps=12, width=16, height=16)
    result = calibrate(video, fast_params, tau_x_grid=(1.0, 2.0), tau_y_grid=(2.0, 4.0))
    assert (result.params.tau_x, result.params.tau_y) in result.grid
    assert result.accuracy == max(result.grid.values())
    assert result.params.block_size == fast_params.block_size


def test_calibration_needs_oracle(tiny_maze, fast_params):
    video = roam(tiny_maze, seed=2, steps=4, width=16, height=16).without_oracle()
    with pytest.raises(ValueError):
        calibrate(video, fast_params)


@pytest.fixture
def stripe_turn_video():
    """Vertical stripes shifted right by 3 px: block matching sees it, corner matching does not."""
    pixels = np.full((64, 64), 128 / 255)
    pixels[:, 12:52] = np.random.default_rng(3).random(40)[None, :]
    frame = Frame.from_intensities(pixels)
    return Video("stripes", "stripes", 0, [frame, shifted(frame, 3)], [(), ()], true_actions=[L])


def test_stripe_pair_means(stripe_turn_video):
    params = DecoderParams(tau_x=2.0, tau_y=4.0, search_radius=6, search_radius_y=2)
    f1, f2 = stripe_turn_video.frames
    assert pair_mean(f1, f2, params) == (3.0, 0.0)
    assert keypoint_mean(f1, f2, params) is None


def test_calibration_uses_the_configured_decoder(stripe_turn_video):
    base = DecoderParams(tau_x=2.0, tau_y=4.0, search_radius=6, search_radius_y=2)
    flow = calibrate(stripe_turn_video, base, tau_x_grid=(2.0,), tau_y_grid=(4.0,))
    matching_base = dataclasses.replace(base, kind=DecoderKind.MATCHING)
    matching = calibrate(stripe_turn_video, matching_base, tau_x_grid=(2.0,), tau_y_grid=(4.0,))
    assert flow.accuracy == 1.0
    assert matching.accuracy == 0.0
    assert matching.params.kind is DecoderKind.MATCHING


def test_calibration_grid_reaches_turn_scale_shifts(tiny_maze):
    video = roam(tiny_maze, seed=2, steps=6, width=16, height=16)
    result = calibrate(video, DecoderParams(block_size=4, search_radius=6, search_radius_y=2))
    assert (0.5, 1.0) in result.grid
    assert (32.0, 8.0) in result.grid


@pytest.mark.slow
class TestRoamerLabeling:
    """64x64 roamer videos; thresholds are fitted on a maze the scored video never visits."""

    @pytest.fixture(scope="class")
    def calibration_video(self):
        return roam(generate_maze(101, 9, 9, 3), seed=1, steps=300, width=64, height=64)

    @pytest.fixture(scope="class")
    def scored_video(self):
        return roam(generate_maze(7, 9, 9, 3), seed=2, steps=300, width=64, height=64)

    @pytest.fixture(scope="class")
    def flow_params(self, calibration_video):
        return calibrate(calibration_video, DecoderParams()).params

    @pytest.fixture(scope="class")
    def flow_accuracy(self, scored_video, flow_params):
        labeled = label_video(scored_video, flow_params)
        return labeling_accuracy(labeled.pseudo_actions, scored_video.true_actions)

    def test_flow_decoder_accuracy(self, flow_accuracy):
        assert flow_accuracy >= 0.90

    def test_matching_decoder_is_less_accurate(self, calibration_video, scored_video, flow_accuracy):
        params = calibrate(calibration_video, DecoderParams(kind=DecoderKind.MATCHING)).params
        labeled = label_video(scored_video, params)
        assert labeling_accuracy(labeled.pseudo_actions, scored_video.true_actions) < flow_accuracy

    def test_turn_sign_consistency(self, calibration_video, flow_params):
        labeled = label_video(calibration_video, flow_params)
        assert turn_sign_consistency(labeled.pseudo_actions, calibration_video.true_actions) >= 0.95
