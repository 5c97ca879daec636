from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import NoAxes
from scene.assembly import Assembly
from robustness.cone import (
    INF,
    cone_line_robustness,
    cone_line_robustness_batch,
    slipping_robustness,
)
from robustness.srmap import SRMap, assembly_forces, compute_sr_map, robustness_summary, static_robustness
from robustness.toppling import TopplingAxis, toppling_axes, toppling_robustness, validate_axis
from tests.conftest import floor_pose, make_box, make_floor, resting
from utils.rng import make_rng

G = 9.81
GRAVITY = (0.0, 0.0, -G)


def cube_scene(mu: float = 0.5, mass: float = 1.0) -> Assembly:
    cube = make_box(mass=mass, mu=mu)
    return Assembly.build([(make_floor(mu=mu), floor_pose()), (cube, resting(cube))])


# friction cone


@pytest.mark.parametrize(
    "r, e, expected",
    [
        ((0, 0, 10), (1, 0, 0), 5.0),
        ((0, 0, 10), (0, 0, 1), INF),
        ((3, 4, 10), (0.6, 0.8, 0), 0.0),
        ((6, 8, 10), (0, 0, 1), 0.0),
        ((6, 8, 10), (1, 0, 0), 0.0),
    ],
)
def test_cone_line_examples(r, e, expected):
    assert cone_line_robustness(r, e, 0.5) == pytest.approx(expected)


def _inside(r, mu) -> bool:
    return math.hypot(r[0], r[1]) <= mu * r[2] + 1e-9


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_cone_limit_agrees_with_line_search(seed):
    rng = make_rng(seed)
    mu = float(rng.uniform(0.1, 1.5))
    r = np.array([*rng.normal(size=2), rng.uniform(1.0, 5.0)])
    if not _inside(r, mu):
        return
    e = rng.normal(size=3)
    e /= np.linalg.norm(e)
    s = cone_line_robustness(r, e, mu)
    if s == INF:
        for step in (1.0, 10.0, 1e3):
            assert _inside(r + step * e, mu)
        return
    assert _inside(r + 0.999 * s * e, mu)
    assert not _inside(r + 1.001 * s * e + 1e-6 * e, mu)


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_batch_cone_matches_scalar(seed):
    rng = make_rng(seed)
    r = np.array([*rng.normal(size=2), rng.uniform(0.5, 5.0)])
    E = rng.normal(size=(16, 3))
    E /= np.linalg.norm(E, axis=1, keepdims=True)
    batch = cone_line_robustness_batch(r, E, 0.7)
    scalar = [cone_line_robustness(r, e, 0.7) for e in E]
    assert np.allclose(batch, scalar, rtol=1e-9, atol=1e-12)


def test_more_friction_is_never_less_robust():
    r, e = (0.5, -0.2, 4.0), (0.8, 0.0, -0.6)
    values = [cone_line_robustness(r, e, mu) for mu in (0.2, 0.4, 0.8, 1.6)]
    assert values == sorted(values)


# slipping


def test_horizontal_push_slips_at_mu_mg():
    assembly = cube_scene()
    forces = assembly_forces(assembly)
    assert slipping_robustness(assembly.contacts, forces, [1.0, 0.0, 0.0]) == pytest.approx(0.5 * G)


def test_downward_push_never_slips():
    assembly = cube_scene()
    forces = assembly_forces(assembly)
    assert slipping_robustness(assembly.contacts, forces, [0.0, 0.0, -1.0]) == INF


def test_top_of_stack_slips_on_its_own_contacts():
    floor = make_floor(mu=0.5)
    lower, upper = make_box("lower"), make_box("upper", mass=2.0)
    assembly = Assembly.build(
        [(floor, floor_pose()), (lower, resting(lower)), (upper, resting(upper, z0=1.0))]
    )
    value = static_robustness(assembly, 2, [-0.5, 0.0, 1.2], [1.0, 0.0, 0.0])
    assert value == pytest.approx(0.5 * 2.0 * G)


# toppling


def test_square_support_has_eight_oriented_axes():
    assembly = cube_scene()
    assert len(toppling_axes(assembly.contacts)) == 8


def test_two_contacts_have_no_axes():
    assembly = cube_scene()
    with pytest.raises(NoAxes):
        toppling_axes(assembly.contacts[:2])


def test_validate_axis_cases():
    assembly = cube_scene()
    forces = assembly_forces(assembly)
    com = np.array([0.0, 0.0, 0.5])

    def valid(start, end):
        return validate_axis(TopplingAxis(np.array(start), np.array(end)), assembly.contacts, forces, 1.0, com, GRAVITY)

    # far bottom edge, oriented so gravity holds the cube down
    assert valid([0.5, -0.5, 0.0], [0.5, 0.5, 0.0])
    assert not valid([0.5, 0.5, 0.0], [0.5, -0.5, 0.0])
    # diagonal under the centre of mass: no gravity moment
    assert not valid([-0.5, -0.5, 0.0], [0.5, 0.5, 0.0])
    # interior axis: the contacts beyond it resist the rotation
    assert not valid([0.25, -0.5, 0.0], [0.25, 0.5, 0.0])


@pytest.mark.parametrize("height, expected", [(1.0, 0.5 * G), (0.75, G * 0.5 / 0.75), (0.0, INF)])
def test_toppling_lever_ratio(height, expected):
    assembly = cube_scene()
    forces = assembly_forces(assembly)
    value = toppling_robustness(
        assembly.contacts, forces, 1.0, [0.0, 0.0, 0.5], [1.0, 0.0, 0.0], [-0.5, 0.0, height], GRAVITY, body=1
    )
    assert value == pytest.approx(expected)


@given(
    st.floats(min_value=-0.5, max_value=0.5),
    st.floats(min_value=-0.5, max_value=0.5),
    st.floats(min_value=0.0, max_value=2.0 * math.pi),
)
def test_push_in_the_support_plane_never_topples(x, y, angle):
    assembly = cube_scene()
    forces = assembly_forces(assembly)
    e = [math.cos(angle), math.sin(angle), 0.0]
    value = toppling_robustness(assembly.contacts, forces, 1.0, [0.0, 0.0, 0.5], e, [x, y, 0.0], GRAVITY, body=1)
    assert value == INF


# static robustness


def test_push_at_top_edge_is_limited_by_both_modes():
    assembly = cube_scene()
    assert static_robustness(assembly, 1, [-0.5, 0.0, 1.0], [1.0, 0.0, 0.0]) == pytest.approx(0.5 * G)


def test_high_friction_isolates_toppling():
    assembly = cube_scene(mu=10.0)
    assert static_robustness(assembly, 1, [-0.5, 0.0, 1.0], [1.0, 0.0, 0.0]) == pytest.approx(0.5 * G)
    assert static_robustness(assembly, 1, [-0.5, 0.0, 0.5], [1.0, 0.0, 0.0]) == pytest.approx(G)


def test_fixed_body_is_infinitely_robust():
    assembly = cube_scene()
    assert static_robustness(assembly, 0, [0.0, 2.0, 0.0], [0.0, 0.0, -1.0]) == INF


# SR map


def test_floor_only_map_is_infinite(floor_only):
    srmap = compute_sr_map(floor_only, density=5.0)
    assert len(srmap) > 0
    assert np.all(np.isinf(srmap.values))
    assert np.all(srmap.fixed)


def test_cube_map_faces():
    srmap = compute_sr_map(cube_scene(), density=50.0)
    cube = srmap.owners == 1
    assert not np.any(cube & (srmap.normals[:, 2] < -0.5))
    top = cube & (srmap.normals[:, 2] > 0.5)
    sides = cube & (np.abs(srmap.normals[:, 2]) < 0.5)
    assert top.any() and sides.any()
    assert np.all(np.isinf(srmap.values[top]))
    assert np.allclose(srmap.values[sides], 0.5 * G)
    assert np.all(np.isinf(srmap.values[srmap.fixed]))


def test_map_values_scale_with_mass():
    light = compute_sr_map(cube_scene(mass=1.0), density=20.0)
    heavy = compute_sr_map(cube_scene(mass=3.0), density=20.0)
    assert np.array_equal(light.finite, heavy.finite)
    assert np.allclose(heavy.values[heavy.finite], 3.0 * light.values[light.finite])


def test_same_scene_gives_the_same_map():
    first = compute_sr_map(cube_scene(), density=30.0)
    second = compute_sr_map(cube_scene(), density=30.0)
    assert np.array_equal(first.positions, second.positions)
    assert np.array_equal(first.values, second.values)


def test_map_rejects_bad_density(floor_only):
    with pytest.raises(ValueError):
        compute_sr_map(floor_only, density=0.0)


def test_summary_ignores_infinite_values():
    n = 3
    srmap = SRMap(
        np.zeros((n, 3)), np.zeros((n, 3)), np.ones(n, int), np.zeros(n, int),
        np.array([1.0, 2.0, INF]), np.zeros(n, bool), 10.0,
    )
    summary = robustness_summary(srmap)
    assert summary["min"] == 1.0
    assert summary["median"] == 1.5
    assert summary["infinite"] == 1
    assert robustness_summary(srmap.subset([False, False, True]))["min"] == INF
