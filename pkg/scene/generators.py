"""Built-in benchmark scenes.

Each generator is deterministic and returns a ``SceneFile`` with the scene
objects and a queue of objects to place. Sizes are desk-scale metres; the
docstring of every builder states the placement challenge it reproduces.
"""

from __future__ import annotations

import math
import re
from typing import Callable, Dict, List

from errors import UnknownScene
from scene.loader import ObjectSpec, SceneFile

FLOOR_EXTENTS = [6.0, 6.0, 0.2]
FLOOR_MU = 0.6
BLOCK_MU = 0.5
BOWL_VERTICES = 150

IDENTITY = [0.0, 0.0, 0.0, 1.0]


def _quat_about(axis: str, degrees: float) -> List[float]:
    half = math.radians(degrees) / 2.0
    q = [0.0, 0.0, 0.0, math.cos(half)]
    q["xyz".index(axis)] = math.sin(half)
    return q


def _floor() -> ObjectSpec:
    return ObjectSpec(
        name="floor",
        mesh={"box": list(FLOOR_EXTENTS)},
        translation=[0.0, 0.0, -FLOOR_EXTENTS[2] / 2.0],
        mu=FLOOR_MU,
        fixed=True,
    )


def _block(name: str, extents: List[float], at: List[float], mass: float, **kw) -> ObjectSpec:
    return ObjectSpec(name=name, mesh={"box": extents}, translation=at, mass=mass, mu=BLOCK_MU, **kw)


def _cube(name: str = "cube", side: float = 0.2, mass: float = 1.0) -> ObjectSpec:
    return ObjectSpec(name=name, mesh={"box": [side, side, side]}, mass=mass, mu=BLOCK_MU)


def cube_scene() -> SceneFile:
    """A cube and a flat fixed floor: face-on-face placement is always available."""
    return SceneFile(objects=[_floor()], queue=[_cube()], description="cube onto a flat floor")


def stack_scene() -> SceneFile:
    """Three stacked blocks of shrinking footprint and a tall post.

    Most surface points lie on vertical faces, so uniform sampling wastes
    attempts on walls that cannot carry a block.
    """
    objects = [
        _floor(),
        _block("base", [0.4, 0.4, 0.3], [0.0, 0.0, 0.15], 3.0),
        _block("middle", [0.3, 0.3, 0.3], [0.0, 0.0, 0.45], 2.0),
        _block("top", [0.2, 0.2, 0.3], [0.0, 0.0, 0.75], 1.0),
        _block("post", [0.1, 0.1, 0.9], [0.45, 0.0, 0.45], 1.0),
    ]
    return SceneFile(objects=objects, queue=[_cube(side=0.15, mass=0.5)], description="stack of blocks")


def pyramids_scene() -> SceneFile:
    """Two truncated pyramids; their sloped flanks are steeper than the friction angle."""
    spec = {"frustum": {"bottom": [0.4, 0.4], "top": [0.08, 0.08], "height": 0.3}}
    objects = [
        _floor(),
        ObjectSpec("pyramid_a", dict(spec), translation=[-0.3, 0.0, 0.15], mass=2.0, mu=BLOCK_MU),
        ObjectSpec("pyramid_b", dict(spec), translation=[0.3, 0.0, 0.15], mass=2.0, mu=BLOCK_MU),
    ]
    return SceneFile(objects=objects, queue=[_cube(side=0.15, mass=0.5)], description="two truncated pyramids")


def table_scene() -> SceneFile:
    """Four thin legs carrying a wide top.

    The top overhangs the legs, so pushes near its rim topple it at low force
    and the leg edges show finite robustness.
    """
    leg_h, top_t = 0.5, 0.04
    legs = [
        _block(f"leg_{k}", [0.05, 0.05, leg_h], [sx * 0.25, sy * 0.15, leg_h / 2.0], 0.3)
        for k, (sx, sy) in enumerate([(-1, -1), (1, -1), (1, 1), (-1, 1)])
    ]
    top = _block("tabletop", [0.9, 0.5, top_t], [0.0, 0.0, leg_h + top_t / 2.0], 1.5)
    return SceneFile(objects=[_floor(), *legs, top], queue=[_cube(side=0.15, mass=0.5)], description="table")


def sawteeth_scene() -> SceneFile:
    """Fixed asymmetric teeth and no floor: no face of the scene is horizontal.

    An object can only rest across sloped flanks, touching them with edges.
    Each tooth's underside slopes down by ``drop`` towards its steep flank.
    """
    pitch, height, length, drop = 0.3, 0.2, 1.0, 0.02
    tooth = {"prism": {"polygon": [[0.0, 0.0], [pitch, -drop], [0.7 * pitch, height]], "height": length}}
    # extrusion along z, rotated so the triangle stands in the xz-plane
    q = _quat_about("x", 90.0)
    teeth = [
        ObjectSpec(f"tooth_{k}", dict(tooth), quaternion=list(q), translation=[(k - 2) * pitch, 0.0, 0.0], mu=BLOCK_MU, fixed=True)
        for k in range(4)
    ]
    return SceneFile(objects=teeth, queue=[_cube(side=0.2, mass=1.0)], description="sawteeth")


def canyon_scene() -> SceneFile:
    """Two fixed thin slabs leaning apart into a V, without a floor.

    Each flank is steeper than the friction angle, so a placement must rest
    on both slabs at once.
    """
    thick, length, height, tilt, gap = 0.05, 1.0, 0.8, 35.0, 0.1
    s, c = math.sin(math.radians(tilt)), math.cos(math.radians(tilt))
    cx = gap / 2.0 + 0.5 * height * s + 0.5 * thick * c
    cz = 0.5 * height * c
    slab = {"box": [thick, length, height]}
    objects = [
        ObjectSpec("wall_left", dict(slab), quaternion=_quat_about("y", -tilt), translation=[-cx, 0.0, cz], mu=BLOCK_MU, fixed=True),
        ObjectSpec("wall_right", dict(slab), quaternion=_quat_about("y", tilt), translation=[cx, 0.0, cz], mu=BLOCK_MU, fixed=True),
    ]
    return SceneFile(objects=objects, queue=[_cube(side=0.25, mass=1.0)], description="canyon")


def bowl_scene(vertices: int = BOWL_VERTICES) -> SceneFile:
    """A bowl with a flattened bottom on the floor, at a chosen vertex budget."""
    objects = [
        _floor(),
        ObjectSpec("bowl", {"bowl": {"vertices": int(vertices), "radius": 0.3, "thickness": 0.03}}, density=500.0, mu=BLOCK_MU),
    ]
    return SceneFile(objects=objects, queue=[_cube(side=0.08, mass=0.2)], description=f"bowl with {int(vertices)} vertices")


def blocks_scene() -> SceneFile:
    """Empty floor and five blocks to place one after another."""
    sizes = [[0.2, 0.2, 0.2], [0.3, 0.15, 0.1], [0.25, 0.1, 0.1], [0.15, 0.15, 0.3], [0.1, 0.1, 0.1]]
    queue = [
        ObjectSpec(f"block_{k}", {"box": size}, mass=round(400.0 * size[0] * size[1] * size[2], 6), mu=BLOCK_MU)
        for k, size in enumerate(sizes)
    ]
    return SceneFile(objects=[_floor()], queue=queue, description="five blocks onto a floor")


SCENES: Dict[str, Callable[[], SceneFile]] = {
    "cube": cube_scene,
    "stack": stack_scene,
    "pyramids": pyramids_scene,
    "table": table_scene,
    "sawteeth": sawteeth_scene,
    "canyon": canyon_scene,
    "bowl": bowl_scene,
    "blocks": blocks_scene,
}

_PARAM = re.compile(r"^(?P<name>[a-z]+)(?:\((?P<arg>\d+)\)|:(?P<arg2>\d+))?$")


def list_scenes() -> List[str]:
    return list(SCENES)


def generate_scene(name: str) -> SceneFile:
    """Scene by name; ``bowl(500)`` or ``bowl:500`` sets the bowl vertex budget."""
    match = _PARAM.match(name.strip().lower())
    if not match or match.group("name") not in SCENES:
        raise UnknownScene(f"unknown scene {name!r}; available: {', '.join(SCENES)}")
    arg = match.group("arg") or match.group("arg2")
    if arg is not None:
        if match.group("name") != "bowl":
            raise UnknownScene(f"scene {match.group('name')!r} takes no parameter")
        return bowl_scene(int(arg))
    return SCENES[match.group("name")]()
