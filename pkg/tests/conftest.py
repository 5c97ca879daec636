from __future__ import annotations

import os
import sys
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

ROOT = Path(__file__).resolve().parents[1]
if str(ROOT) not in sys.path:
    sys.path.insert(0, str(ROOT))

from geometry.primitives import Pose, rotation_about  # noqa: E402
from geometry.shapes import box  # noqa: E402
from scene.assembly import Assembly, PolyObject  # noqa: E402

settings.register_profile("fast", max_examples=25, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.register_profile("ci", max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.getenv("HYPOTHESIS_PROFILE", "fast"))


def make_floor(mu: float = 0.6) -> PolyObject:
    return PolyObject("floor", box([6.0, 6.0, 0.2]), 0.0, np.zeros(3), mu, fixed=True)


def make_box(name: str = "cube", extents=(1.0, 1.0, 1.0), mass: float = 1.0, mu: float = 0.5) -> PolyObject:
    return PolyObject(name, box(extents), mass, np.zeros(3), mu)


def floor_pose() -> Pose:
    return Pose(np.eye(3), [0.0, 0.0, -0.1])


def resting(obj: PolyObject, x: float = 0.0, y: float = 0.0, z0: float = 0.0) -> Pose:
    """Pose putting an axis-aligned box with its bottom face at height z0."""
    lo, _ = obj.mesh.bounds
    return Pose(np.eye(3), [x, y, z0 - lo[2]])


def tilted_floor_and_cube(angle_deg: float, mu: float, side: float = 1.0, mass: float = 1.0) -> Assembly:
    """Fixed slab tilted about x with a cube resting face-down on it."""
    R = rotation_about([1.0, 0.0, 0.0], np.radians(angle_deg))
    slab = PolyObject("slope", box([6.0, 6.0, 0.2]), 0.0, np.zeros(3), mu, fixed=True)
    cube = PolyObject("cube", box([side, side, side]), mass, np.zeros(3), mu)
    return Assembly.build(
        [
            (slab, Pose(R, np.zeros(3))),
            (cube, Pose(R, R @ np.array([0.0, 0.0, 0.1 + side / 2.0]))),
        ]
    )


@pytest.fixture
def floor() -> PolyObject:
    return make_floor()


@pytest.fixture
def cube() -> PolyObject:
    return make_box()


@pytest.fixture
def floor_only(floor) -> Assembly:
    return Assembly.build([(floor, floor_pose())])


@pytest.fixture
def cube_on_floor(floor, cube) -> Assembly:
    return Assembly.build([(floor, floor_pose()), (cube, resting(cube))])


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(1234)
