from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from errors import Infeasible, NoEquilibrium, Unsupported
from geometry.primitives import Pose, rotation_about
from scene.assembly import Assembly
from statics.contacts import make_contact, tangent_frame
from statics.equilibrium import (
    build_equilibrium_system,
    check_equilibrium,
    contacts_of,
    independent_rows,
    solve_reaction_forces_qr,
)
from statics.qp import friction_constraints, solve_reaction_forces_qp
from tests.conftest import floor_pose, make_box, make_floor, resting, tilted_floor_and_cube
from utils.rng import make_rng

G = 9.81


def system_of(assembly: Assembly):
    return build_equilibrium_system(assembly, assembly.contacts, assembly.gravity)


def test_tangent_frame_is_right_handed():
    for n in ([0, 0, 1.0], [1.0, 0, 0], [0.3, -0.2, 0.9]):
        n = np.asarray(n) / np.linalg.norm(n)
        u, v = tangent_frame(n)
        C = np.column_stack([u, v, n])
        assert np.allclose(C.T @ C, np.eye(3), atol=1e-12)
        assert np.linalg.det(C) == pytest.approx(1.0)


def test_contact_rejects_negative_friction():
    with pytest.raises(ValueError):
        make_contact([0, 0, 0], [0, 0, 1.0], -0.1, (0, 1))


def test_cube_on_floor_has_four_corner_contacts(cube_on_floor):
    assert len(cube_on_floor.contacts) == 4
    for c in cube_on_floor.contacts:
        assert c.bodies == (0, 1)
        assert np.allclose(c.normal, [0, 0, 1.0])
        assert c.mu == pytest.approx(0.5)
    assert contacts_of(cube_on_floor.contacts, 1) == [0, 1, 2, 3]


def test_qr_splits_weight_evenly(cube_on_floor):
    sol = solve_reaction_forces_qr(system_of(cube_on_floor))
    assert sol.residual < 1e-8 * G
    assert np.allclose(sol.forces, [[0, 0, G / 4]] * 4, atol=1e-9)
    assert sol.max_tension == 0.0
    assert check_equilibrium(sol, 1e-6)


def test_fixed_rows_are_absent(cube_on_floor):
    system = system_of(cube_on_floor)
    assert system.A.shape == (6, 12)
    assert system.object_rows == {1: 0}
    assert system.total_weight == pytest.approx(G)


def test_unsupported_object_raises(floor, cube):
    floating = Assembly.build([(floor, floor_pose()), (cube, resting(cube, z0=1.0))])
    with pytest.raises(Unsupported):
        system_of(floating)


def test_overhanging_beam_needs_tension():
    floor = make_floor()
    beam = make_box("beam", (1.0, 0.2, 0.2))
    post = make_box("post", (0.2, 0.2, 1.0))
    assembly = Assembly.build(
        [
            (floor, floor_pose()),
            (post, resting(post)),
            # beam centre of mass 0.35 m beyond the far edge of the post top
            (beam, resting(beam, x=0.45, z0=1.0)),
        ]
    )
    system = system_of(assembly)
    assert solve_reaction_forces_qr(system).max_tension > 0.0
    with pytest.raises(Infeasible):
        solve_reaction_forces_qp(system)


def test_cube_on_an_off_centre_edge_has_no_equilibrium():
    cube = make_box()
    R = rotation_about([0.0, 1.0, 0.0], math.radians(30.0))
    lowest = (cube.mesh.vertices @ R.T)[:, 2].min()
    assembly = Assembly.build([(make_floor(), floor_pose()), (cube, Pose(R, [0.0, 0.0, -lowest]))])
    assert len(assembly.contacts) == 2
    with pytest.raises(NoEquilibrium):
        solve_reaction_forces_qr(system_of(assembly))


def test_independent_rows_drops_duplicates():
    A = np.array([[1.0, 0, 0], [2.0, 0, 0], [0, 1.0, 0]])
    assert list(independent_rows(A)) in ([0, 2], [1, 2])


def test_friction_pyramid_rows(cube_on_floor):
    G_ = friction_constraints(system_of(cube_on_floor))
    assert G_.shape == (20, 12)
    f = np.zeros(12)
    f[2::3] = 1.0
    assert np.all(G_ @ f <= 0)


def test_qp_matches_qr_when_qr_is_feasible(cube_on_floor):
    system = system_of(cube_on_floor)
    qr = solve_reaction_forces_qr(system)
    qp = solve_reaction_forces_qp(system)
    assert np.allclose(qp.forces, qr.forces, atol=1e-8)
    assert abs(0.5 * np.sum(qp.forces**2) - 0.5 * np.sum(qr.forces**2)) < 1e-9


def test_cube_on_twenty_degree_slope():
    assembly = tilted_floor_and_cube(20.0, mu=0.5)
    sol = solve_reaction_forces_qp(system_of(assembly))
    tangential = np.linalg.norm(sol.local[:, :2].sum(axis=0))
    normal = sol.local[:, 2].sum()
    assert tangential / normal == pytest.approx(math.tan(math.radians(20.0)), abs=1e-6)
    assert sol.friction_violation <= 1e-9
    assert sol.max_tension <= 1e-9


@given(
    st.integers(min_value=0, max_value=25),
    st.floats(min_value=0.2, max_value=5.0),
    st.floats(min_value=1.5, max_value=10.0),
)
def test_qp_forces_scale_with_mass(angle, mass, factor):
    light = solve_reaction_forces_qp(system_of(tilted_floor_and_cube(float(angle), mu=0.6, mass=mass)))
    heavy = solve_reaction_forces_qp(system_of(tilted_floor_and_cube(float(angle), mu=0.6, mass=mass * factor)))
    assert np.allclose(heavy.forces, factor * light.forces, rtol=1e-6, atol=1e-7 * mass * factor * G)


def test_steep_slope_with_low_friction_is_infeasible():
    assembly = tilted_floor_and_cube(45.0, mu=0.2)
    system = system_of(assembly)
    solve_reaction_forces_qr(system)
    with pytest.raises(Infeasible):
        solve_reaction_forces_qp(system)


@given(st.integers(min_value=0, max_value=2**32 - 1))
def test_random_stable_stacks(seed):
    """Two boxes stacked with a random in-support offset: QR exact, QP feasible and no worse."""
    rng = make_rng(seed)
    floor = make_floor(mu=0.8)
    lower = make_box("lower", tuple(rng.uniform(0.3, 1.0, size=3)), mass=float(rng.uniform(0.5, 5.0)), mu=0.8)
    upper_ext = tuple(rng.uniform(0.2, 0.8, size=3))
    upper = make_box("upper", upper_ext, mass=float(rng.uniform(0.5, 5.0)), mu=0.8)
    lo_l, hi_l = lower.mesh.bounds
    # keep the upper centre of mass inside the lower top face
    dx = float(rng.uniform(0.4 * lo_l[0], 0.4 * hi_l[0]))
    dy = float(rng.uniform(0.4 * lo_l[1], 0.4 * hi_l[1]))
    assembly = Assembly.build(
        [
            (floor, floor_pose()),
            (lower, resting(lower)),
            (upper, resting(upper, dx, dy, z0=hi_l[2] - lo_l[2])),
        ]
    )
    system = system_of(assembly)
    qr = solve_reaction_forces_qr(system)
    assert qr.residual < 1e-8 * np.linalg.norm(system.b)
    qp = solve_reaction_forces_qp(system)
    assert qp.residual < 1e-8 * max(1.0, np.linalg.norm(system.b))
    assert qp.max_tension <= 1e-9
    assert qp.friction_violation <= 1e-9
    assert 0.5 * np.sum(qp.forces**2) >= 0.5 * np.sum(qr.forces**2) - 1e-9
    if qr.max_tension == 0.0 and qr.friction_violation == 0.0:
        assert abs(0.5 * np.sum(qp.forces**2) - 0.5 * np.sum(qr.forces**2)) < 1e-9


def test_no_contacts_and_no_movables():
    assembly = Assembly.build([(make_floor(), Pose.identity())])
    system = system_of(assembly)
    assert system.A.shape == (0, 0)
    assert solve_reaction_forces_qp(system).residual == 0.0
