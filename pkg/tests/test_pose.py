from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from errors import DegeneratePose
from geometry.mesh import transform
from geometry.primitives import Pose, unit
from geometry.shapes import box
from planner.matching import COPLANAR, SceneContactSample, enumerate_feature_pairs, match_pair
from planner.pose import candidate_poses, determine_pose
from utils.rng import make_rng


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_pose_recovers_a_known_transform(seed):
    rng = make_rng(seed)
    R = Rotation.random(random_state=rng).as_matrix()
    t = rng.normal(size=3)
    q, r = rng.normal(size=3), rng.normal(size=3)
    n_obj = unit(rng.normal(size=3))
    d = unit(q - r)
    if np.linalg.norm(np.cross(d, n_obj)) < 0.05:
        return
    a, b = R @ q + t, R @ r + t
    pose = determine_pose(a, b, -(R @ n_obj), q, r, n_obj)
    assert np.allclose(pose.rotation, R, atol=1e-8)
    assert np.allclose(pose.translation, t, atol=1e-8)
    assert np.allclose(pose.apply(q), a, atol=1e-9)
    assert np.allclose(pose.apply(r), b, atol=1e-9)


def test_face_down_on_the_floor():
    # object face with normal -z lands on floor samples with normal +z
    pose = determine_pose([1.0, 0, 0], [0, 0, 0], [0, 0, 1.0], [0.5, 0, -0.5], [-0.5, 0, -0.5], [0, 0, -1.0])
    assert np.allclose(pose.rotation, np.eye(3), atol=1e-12)
    assert np.allclose(pose.translation, [0.5, 0, 0.5])


def test_coincident_points_are_degenerate():
    with pytest.raises(DegeneratePose):
        determine_pose([0, 0, 0], [0, 0, 0], [0, 0, 1.0], [1, 0, 0], [0, 0, 0], [0, 0, -1.0])


def test_normal_along_the_pair_is_degenerate():
    with pytest.raises(DegeneratePose):
        determine_pose([1.0, 0, 0], [0, 0, 0], [1.0, 0, 0], [1, 0, 0], [0, 0, 0], [0, 0, -1.0])


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_matched_face_pair_puts_the_face_on_the_floor(seed):
    rng = make_rng(seed)
    start = Pose(Rotation.random(random_state=rng).as_matrix(), rng.normal(size=3))
    mesh = transform(box([0.6, 0.4, 0.3]), start)
    L = float(rng.uniform(0.05, 0.25))
    heading = float(rng.uniform(0.0, 2.0 * np.pi))
    up = np.array([0.0, 0.0, 1.0])
    a_pos = np.array([*rng.uniform(-1.0, 1.0, size=2), 0.0])
    b_pos = a_pos + L * np.array([np.cos(heading), np.sin(heading), 0.0])
    a, b = SceneContactSample(a_pos, up, 0, 0), SceneContactSample(b_pos, up, 0, 0)

    pairs = [p for p in enumerate_feature_pairs(mesh, a, b, L) if p.kind == COPLANAR]
    assert len(pairs) == len(mesh.faces)
    for pair in pairs:
        matched = match_pair(mesh, start.translation, pair)
        assert np.linalg.norm(matched.q - matched.r) == pytest.approx(L)
        candidates = candidate_poses(mesh, a, b, matched)
        assert candidates
        for candidate in candidates:
            assert np.allclose(candidate.pose.apply(matched.q), a_pos, atol=1e-9)
            assert np.allclose(candidate.pose.apply(matched.r), b_pos, atol=1e-9)
            placed = transform(mesh, candidate.pose)
            assert np.allclose(placed.faces[pair.feature1[1]].normal, -up, atol=1e-9)
            assert placed.bounds[0][2] == pytest.approx(0.0, abs=1e-9)
