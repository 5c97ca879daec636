from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.spatial.transform import Rotation

from errors import DegenerateHull, InvalidMesh, NoIntersection, ParallelLines, ParallelPlanes
from geometry.hull import quickhull
from geometry.mesh import extract_features, load_obj, mesh_mass_properties, oriented_box_volume, transform
from geometry.primitives import (
    Line,
    Plane,
    Pose,
    closest_points_between_lines,
    line_plane_intersection,
    plane_plane_intersection,
    project_point_to_line,
    project_point_to_plane,
    rotation_between_vectors,
    unit,
)
from geometry.shapes import bowl, bowl_resolution, box, frustum, icosphere, prism
from utils.rng import make_rng

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def random_unit(rng) -> np.ndarray:
    v = rng.normal(size=3)
    return v / np.linalg.norm(v)


# primitives


def test_plane_projection_lands_on_plane():
    plane = Plane.through([0.0, 0.0, 2.0], [0.0, 0.0, 1.0])
    assert np.allclose(project_point_to_plane([1.0, -3.0, 7.0], plane), [1.0, -3.0, 2.0])


def test_line_projection():
    line = Line([0.0, 0.0, 0.0], [1.0, 0.0, 0.0])
    assert np.allclose(project_point_to_line([2.0, 5.0, -1.0], line), [2.0, 0.0, 0.0])


def test_plane_rejects_non_unit_normal():
    with pytest.raises(ValueError):
        Plane([0.0, 0.0, 2.0], 1.0)


@given(seeds)
def test_closest_points_are_mutually_perpendicular(seed):
    rng = make_rng(seed)
    e1 = Line(rng.normal(size=3), random_unit(rng))
    e2 = Line(rng.normal(size=3), random_unit(rng))
    if np.linalg.norm(np.cross(e1.direction, e2.direction)) < 1e-3:
        return
    t1, t2 = closest_points_between_lines(e1, e2)
    gap = e1.at(t1) - e2.at(t2)
    assert abs(gap @ e1.direction) < 1e-9
    assert abs(gap @ e2.direction) < 1e-9


def test_parallel_lines_raise():
    with pytest.raises(ParallelLines):
        closest_points_between_lines(Line([0, 0, 0], [1.0, 0, 0]), Line([0, 1, 0], [1.0, 0, 0]))


@given(seeds)
def test_plane_plane_line_lies_on_both(seed):
    rng = make_rng(seed)
    p1 = Plane(random_unit(rng), rng.normal())
    p2 = Plane(random_unit(rng), rng.normal())
    if np.linalg.norm(np.cross(p1.normal, p2.normal)) < 1e-3:
        return
    line = plane_plane_intersection(p1, p2)
    for t in (-1.0, 0.0, 2.5):
        assert abs(p1.residual(line.at(t))) < 1e-9
        assert abs(p2.residual(line.at(t))) < 1e-9


def test_parallel_planes_raise():
    with pytest.raises(ParallelPlanes):
        plane_plane_intersection(Plane([0, 0, 1.0], 0.0), Plane([0, 0, -1.0], 1.0))


def test_line_plane_intersection():
    t, p = line_plane_intersection(Line([0, 0, 5.0], [0, 0, -1.0]), Plane([0, 0, 1.0], 1.0))
    assert t == pytest.approx(4.0)
    assert np.allclose(p, [0, 0, 1.0])
    with pytest.raises(NoIntersection):
        line_plane_intersection(Line([0, 0, 5.0], [1.0, 0, 0]), Plane([0, 0, 1.0], 1.0))


@given(seeds)
def test_rotation_between_vectors(seed):
    rng = make_rng(seed)
    a, b = random_unit(rng), random_unit(rng)
    R = rotation_between_vectors(a, b)
    assert np.allclose(R @ a, b, atol=1e-9)
    assert np.allclose(R.T @ R, np.eye(3), atol=1e-9)
    assert np.linalg.det(R) == pytest.approx(1.0)


def test_rotation_between_antipodal_vectors():
    a = unit([1.0, 2.0, 3.0])
    R = rotation_between_vectors(a, -a)
    assert np.allclose(R @ a, -a, atol=1e-12)
    assert np.linalg.det(R) == pytest.approx(1.0)


@given(seeds)
def test_pose_inverse_and_compose(seed):
    rng = make_rng(seed)
    P = Pose(Rotation.random(random_state=rng).as_matrix(), rng.normal(size=3))
    Q = Pose(Rotation.random(random_state=rng).as_matrix(), rng.normal(size=3))
    x = rng.normal(size=3)
    assert np.allclose(P.inverse().apply(P.apply(x)), x, atol=1e-9)
    assert np.allclose(P.compose(Q).apply(x), P.apply(Q.apply(x)), atol=1e-9)
    back = Pose.from_quaternion(P.quaternion(), P.translation)
    assert np.allclose(back.rotation, P.rotation, atol=1e-9)
    assert P.quaternion()[3] >= 0


def test_pose_rejects_reflection():
    with pytest.raises(ValueError):
        Pose(np.diag([1.0, 1.0, -1.0]), np.zeros(3))


# convex hull


def test_hull_of_cube_corners():
    corners = np.array([[x, y, z] for x in (0, 1) for y in (0, 1) for z in (0, 1)], dtype=float)
    hull = quickhull(np.vstack([corners, [[0.5, 0.5, 0.5]]]))
    assert not hull.planar
    assert sorted(hull.vertices) == list(range(8))
    assert len(hull.edges) == 12


def test_planar_square_hull_with_interior_point():
    pts = np.array([[0, 0, 0], [1, 0, 0], [1, 1, 0], [0, 1, 0], [0.5, 0.5, 0]], dtype=float)
    hull = quickhull(pts)
    assert hull.planar
    assert sorted(hull.vertices) == [0, 1, 2, 3]
    assert len(hull.edges) == 4


def test_collinear_points_have_no_hull():
    with pytest.raises(DegenerateHull):
        quickhull([[0, 0, 0], [1, 0, 0], [2, 0, 0]])
    with pytest.raises(DegenerateHull):
        quickhull([[0, 0, 0], [1, 0, 0]])


@given(seeds)
def test_random_cloud_hull_contains_every_point(seed):
    rng = make_rng(seed)
    pts = rng.normal(size=(30, 3))
    hull = quickhull(pts)
    for i, j, k in hull.facets:
        n = np.cross(pts[j] - pts[i], pts[k] - pts[i])
        n /= np.linalg.norm(n)
        assert np.all((pts - pts[i]) @ n <= 1e-8)
    # extreme points along random directions are hull vertices
    for _ in range(5):
        d = random_unit(rng)
        assert int(np.argmax(pts @ d)) in hull.vertices


# meshes


def test_box_features():
    mesh = box([1.0, 2.0, 3.0])
    assert len(mesh.vertices) == 8
    assert len(mesh.faces) == 6
    assert len(mesh.edges) == 12
    assert all(e.convex for e in mesh.edges)
    assert mesh.surface_area == pytest.approx(2 * (2 + 3 + 6))


def test_side_vectors_point_into_their_faces():
    mesh = frustum([1.0, 1.0], [0.4, 0.6], 0.5)
    for e in mesh.edges:
        mid = 0.5 * (e.start + e.end)
        assert (mesh.faces[e.face1].centroid - mid) @ e.side1 > 0
        assert (mesh.faces[e.face2].centroid - mid) @ e.side2 > 0
        assert abs(e.side1 @ e.normal1) < 1e-12
        assert abs(e.side2 @ e.normal2) < 1e-12


def test_face_offsets_and_outward_normals():
    mesh = box([1.0, 1.0, 1.0])
    for f in mesh.faces:
        assert f.offset == pytest.approx(0.5)
        assert f.normal @ f.centroid > 0


def test_inverted_triangles_are_reoriented():
    mesh = box([1.0, 1.0, 1.0])
    flipped = extract_features(mesh.vertices, mesh.triangles[:, ::-1])
    assert all(f.normal @ f.centroid > 0 for f in flipped.faces)


def test_l_prism_has_concave_edge():
    mesh = prism([[0, 0], [2, 0], [2, 1], [1, 1], [1, 2], [0, 2]], 1.0, apex=3)
    assert len(mesh.faces) == 8
    assert sum(not e.convex for e in mesh.edges) == 1


def test_mass_properties_of_box():
    mass, com, volume = mesh_mass_properties(box([1.0, 2.0, 3.0]), 2.0)
    assert volume == pytest.approx(6.0)
    assert mass == pytest.approx(12.0)
    assert np.allclose(com, 0.0, atol=1e-12)


def test_transform_moves_features():
    mesh = box([1.0, 1.0, 1.0])
    pose = Pose(Rotation.from_euler("z", 90, degrees=True).as_matrix(), [1.0, 2.0, 3.0])
    world = transform(mesh, pose)
    assert np.allclose(world.vertices, pose.apply(mesh.vertices))
    for f, g in zip(mesh.faces, world.faces):
        assert g.offset == pytest.approx(g.normal @ g.centroid)
        assert np.allclose(g.normal, pose.rotation @ f.normal)


def test_oriented_box_volume_of_rotated_box():
    mesh = box([1.0, 2.0, 3.0])
    R = Rotation.from_euler("xyz", [20, 30, 40], degrees=True).as_matrix()
    assert oriented_box_volume(mesh.vertices @ R.T) == pytest.approx(6.0, rel=1e-6)


def test_load_obj_with_quads(tmp_path):
    text = "\n".join(
        [
            "v 0 0 0", "v 1 0 0", "v 1 1 0", "v 0 1 0",
            "v 0 0 1", "v 1 0 1", "v 1 1 1", "v 0 1 1",
            "f 1 4 3 2", "f 5 6 7 8", "f 1 2 6 5", "f 2 3 7 6", "f 3 4 8 7", "f -1 -5 -8 -4",
        ]
    )
    path = tmp_path / "cube.obj"
    path.write_text(text)
    mesh = load_obj(path)
    assert len(mesh.faces) == 6
    assert len(mesh.edges) == 12


def test_load_obj_rejects_garbage(tmp_path):
    path = tmp_path / "bad.obj"
    path.write_text("v 0 0 zero\n")
    with pytest.raises(InvalidMesh):
        load_obj(path)


def test_icosphere_is_closed():
    mesh = icosphere(0.5, 1)
    _, _, volume = mesh_mass_properties(mesh, 1.0)
    assert 0.3 < volume < 4.0 / 3.0 * np.pi * 0.125


@pytest.mark.parametrize("budget", [50, 150, 500, 1500])
def test_bowl_vertex_budget(budget):
    rings, segments = bowl_resolution(budget)
    mesh = bowl(budget)
    assert len(mesh.vertices) == 2 * rings * segments + 2
    assert abs(len(mesh.vertices) - budget) <= 0.1 * budget
    assert mesh.vertices[:, 2].min() == pytest.approx(0.0, abs=1e-12)


def test_bowl_rim_is_an_annulus():
    mesh = bowl(150)
    rim = max(mesh.faces, key=lambda f: f.centroid[2])
    assert rim.normal[2] == pytest.approx(1.0)
    assert len(rim.holes) == 1
