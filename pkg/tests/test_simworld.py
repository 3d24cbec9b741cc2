import numpy as np
import pytest

from src.domain.entities.enums import PrimitiveAction
from src.domain.entities.maze import GoalSpec, Maze, Pose, SceneObject
from src.domain.exceptions import GoalSamplingError
from src.domain.services.kinematics import FORWARD_STEP, step
from src.domain.services.maze_generator import generate_maze, is_connected
from src.domain.services.navigation_oracle import geodesic_distance, is_success, line_of_sight
from src.domain.services.renderer import cast_columns, render, slice_height
from src.domain.services.roamer import extract_goal_images, random_start, roam


def test_generated_maze_is_connected(tiny_maze):
    """Every free cell is reachable from every other."""
    assert is_connected(tiny_maze.cells)
    assert len(tiny_maze.objects) == 4


def test_generate_maze_is_deterministic():
    a = generate_maze(0, 9, 9, 4)
    b = generate_maze(0, 9, 9, 4)
    assert np.array_equal(a.cells, b.cells)
    assert a.objects == b.objects
    assert a.wall_texture_seed == b.wall_texture_seed


def test_generate_maze_seed_changes_grid():
    assert not np.array_equal(generate_maze(0, 9, 9, 4).cells, generate_maze(1, 9, 9, 4).cells)


def test_layout_seed_keeps_topology():
    """A new layout moves objects but keeps walls and textures."""
    base = generate_maze(5, 9, 9, 4, layout_seed=1)
    other = generate_maze(5, 9, 9, 4, layout_seed=2)
    assert np.array_equal(base.cells, other.cells)
    assert base.wall_texture_seed == other.wall_texture_seed
    assert [(o.cx, o.cy) for o in base.objects] != [(o.cx, o.cy) for o in other.objects]


def test_generate_maze_rejects_too_many_objects():
    with pytest.raises(ValueError):
        generate_maze(0, 5, 5, 500)


def test_turn_left_adds_thirty_degrees(corridor_maze):
    pose, collided = step(corridor_maze, Pose(0.75, 0.75, 0), PrimitiveAction.TURN_LEFT)
    assert pose.heading == 30
    assert not collided


def test_turn_right_wraps_heading(corridor_maze):
    pose, _ = step(corridor_maze, Pose(0.75, 0.75, 0), PrimitiveAction.TURN_RIGHT)
    assert pose.heading == 330


def test_move_forward_advances_quarter_meter(corridor_maze):
    pose, collided = step(corridor_maze, Pose(0.75, 0.75, 0), PrimitiveAction.MOVE_FORWARD)
    assert not collided
    assert pose.x == 0.75 + FORWARD_STEP
    assert pose.y == 0.75


def test_blocked_move_leaves_pose_unchanged(corridor_maze):
    """The east wall starts at x = 3.0."""
    start = Pose(2.8, 0.75, 0)
    pose, collided = step(corridor_maze, start, PrimitiveAction.MOVE_FORWARD)
    assert collided
    assert pose == start


def test_pose_rejects_unaligned_heading():
    with pytest.raises(ValueError):
        Pose(0.0, 0.0, 45)


def test_render_is_deterministic(tiny_maze):
    pose = random_start(tiny_maze, np.random.default_rng(0))
    assert render(tiny_maze, pose, 32, 32) == render(tiny_maze, pose, 32, 32)


def test_render_rejects_wall_pose(corridor_maze):
    with pytest.raises(ValueError):
        render(corridor_maze, Pose(0.25, 0.25, 0), 16, 16)


def test_wall_slice_height_halves_with_double_distance(corridor_maze):
    near = cast_columns(corridor_maze, Pose(2.0, 0.75, 0), 64)[32].distance
    far = cast_columns(corridor_maze, Pose(1.0, 0.75, 0), 64)[32].distance
    assert near == pytest.approx(1.0)
    assert far == pytest.approx(2.0)
    assert slice_height(near, 64) / slice_height(far, 64) == pytest.approx(2.0)
    assert abs(slice_height(near, 64) - 2 * slice_height(far, 64)) <= 1.0


def test_point_symmetric_poses_see_the_same_depths(corridor_maze):
    """The corridor is point-symmetric about (1.75, 0.75)."""
    a = cast_columns(corridor_maze, Pose(1.25, 0.75, 0), 64)
    b = cast_columns(corridor_maze, Pose(2.25, 0.75, 180), 64)
    np.testing.assert_allclose([h.distance for h in a], [h.distance for h in b], atol=1e-9)


def test_geodesic_zero_in_goal_cell(corridor_maze):
    assert geodesic_distance(corridor_maze, Pose(2.6, 0.7, 90), GoalSpec("goal")) == 0.0


def test_geodesic_one_cell_away(corridor_maze):
    assert geodesic_distance(corridor_maze, Pose(2.25, 0.75, 0), GoalSpec("goal")) == pytest.approx(0.5, abs=0.125)


def test_geodesic_along_four_cell_corridor(corridor_maze):
    assert geodesic_distance(corridor_maze, Pose(0.75, 0.75, 0), GoalSpec("goal")) == pytest.approx(2.0, abs=0.125)


@pytest.mark.parametrize("seed", range(20))
def test_geodesic_triangle_inequality(tiny_maze, seed):
    rng = np.random.default_rng(seed)
    free = tiny_maze.free_cells()
    picks = rng.choice(len(free), size=3, replace=False)
    (ax, ay), (bx, by), (cx, cy) = (free[i] for i in picks)
    maze = Maze(
        "triangle", tiny_maze.cells,
        [SceneObject("b", bx, by, 1), SceneObject("c", cx, cy, 2)],
        wall_texture_seed=0
    )
    size = maze.cell_size
    a = Pose((ax + rng.uniform(0.1, 0.9)) * size, (ay + rng.uniform(0.1, 0.9)) * size, 0)
    b = Pose(*maze.cell_center(bx, by), heading=0)
    a_to_c = geodesic_distance(maze, a, GoalSpec("c"))
    a_to_b = geodesic_distance(maze, a, GoalSpec("b"))
    b_to_c = geodesic_distance(maze, b, GoalSpec("c"))
    assert a_to_c <= a_to_b + b_to_c + 0.25


def test_success_when_close_and_visible(corridor_maze):
    assert is_success(corridor_maze, Pose(2.25, 0.75, 0), GoalSpec("goal"))


def test_no_success_when_facing_away(corridor_maze):
    assert not is_success(corridor_maze, Pose(2.25, 0.75, 180), GoalSpec("goal"))


def test_no_success_beyond_radius(corridor_maze):
    assert not is_success(corridor_maze, Pose(1.25, 0.75, 0), GoalSpec("goal"))


def test_no_success_through_wall():
    cells = np.array([
        [1, 1, 1, 1, 1],
        [1, 0, 1, 0, 1],
        [1, 0, 0, 0, 1],
        [1, 1, 1, 1, 1],
    ], dtype=bool)
    maze = Maze("u_shape", cells, [SceneObject("goal", 3, 1, 1)], wall_texture_seed=0)
    pose = Pose(0.95, 0.75, 0)
    assert not line_of_sight(maze, pose.x, pose.y, 1.75, 0.75)
    assert not is_success(maze, pose, GoalSpec("goal"))


def test_roam_counts_frames_and_actions(tiny_maze):
    video = roam(tiny_maze, seed=3, steps=60, width=16, height=16)
    assert len(video.frames) == 60
    assert len(video.true_actions) == 59
    assert PrimitiveAction.STOP not in video.true_actions


def test_roam_turns_after_every_collision(tiny_maze):
    video = roam(tiny_maze, seed=4, steps=200, width=16, height=16)
    turns = (PrimitiveAction.TURN_LEFT, PrimitiveAction.TURN_RIGHT)
    collisions = 0
    for t in range(len(video.true_actions) - 1):
        if video.true_actions[t] is PrimitiveAction.MOVE_FORWARD and video.poses[t + 1] == video.poses[t]:
            collisions += 1
            assert video.true_actions[t + 1] in turns
    assert collisions > 0


def test_roam_is_deterministic(tiny_maze):
    a = roam(tiny_maze, seed=9, steps=40, width=16, height=16)
    b = roam(tiny_maze, seed=9, steps=40, width=16, height=16)
    assert a.frames == b.frames
    assert a.true_actions == b.true_actions
    assert a.success_objects == b.success_objects


def test_goal_images_are_success_states(tiny_maze):
    images = extract_goal_images(tiny_maze, "obj0", k=3, seed=1, width=16, height=16)
    assert len(images) == 3
    for image in images:
        assert image.object_id == "obj0"
        assert is_success(tiny_maze, image.capture_pose, GoalSpec("obj0"))


def test_goal_images_unknown_object(tiny_maze):
    with pytest.raises(ValueError):
        extract_goal_images(tiny_maze, "missing", k=1, width=16, height=16)


def test_goal_sampling_error_is_a_value_error():
    assert issubclass(GoalSamplingError, ValueError)


def test_goal_images_are_deterministic(tiny_maze):
    a = extract_goal_images(tiny_maze, "obj1", k=2, seed=5, width=16, height=16)
    b = extract_goal_images(tiny_maze, "obj1", k=2, seed=5, width=16, height=16)
    assert a == b
