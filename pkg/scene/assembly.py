"""Posed objects and the contacts between them.

An ``Assembly`` is immutable: placing an object returns a new assembly with
the object appended (its id is its index) and its contacts added.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Dict, List, Sequence, Tuple

import numpy as np

from geometry.mesh import PolyMesh, oriented_box_volume, transform
from geometry.primitives import Pose
from planner.interfaces import ContactInterface, interfaces_between
from statics.contacts import ContactPoint

DEFAULT_GRAVITY = (0.0, 0.0, -9.81)


@dataclass(frozen=True)
class PolyObject:
    name: str
    mesh: PolyMesh
    mass: float
    com: np.ndarray
    mu: float
    fixed: bool = False
    source: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if not self.fixed and self.mass <= 0:
            raise ValueError(f"object {self.name!r}: mass must be positive")
        if self.mu < 0:
            raise ValueError(f"object {self.name!r}: friction must be non-negative")
        object.__setattr__(self, "com", np.asarray(self.com, dtype=float))

    @property
    def radius(self) -> float:
        """Radius of the sphere about the centre of mass enclosing the mesh."""
        return self.mesh.radius_about(self.com)


@dataclass(frozen=True)
class PlacedObject:
    obj: PolyObject
    pose: Pose
    world: PolyMesh
    com_world: np.ndarray

    @classmethod
    def at(cls, obj: PolyObject, pose: Pose) -> "PlacedObject":
        return cls(obj, pose, transform(obj.mesh, pose), pose.apply(obj.com))

    @property
    def fixed(self) -> bool:
        return self.obj.fixed


@dataclass(frozen=True)
class Assembly:
    placed: Tuple[PlacedObject, ...] = ()
    contacts: Tuple[ContactPoint, ...] = ()
    interfaces: Tuple[ContactInterface, ...] = ()
    gravity: np.ndarray = field(default_factory=lambda: np.array(DEFAULT_GRAVITY))

    def __post_init__(self) -> None:
        object.__setattr__(self, "gravity", np.asarray(self.gravity, dtype=float))

    @classmethod
    def build(
        cls,
        objects: Sequence[Tuple[PolyObject, Pose]],
        gravity=DEFAULT_GRAVITY,
        contact_tol: float = 1e-4,
    ) -> "Assembly":
        """Pose every object and resolve contacts between all pairs."""
        placed = tuple(PlacedObject.at(obj, pose) for obj, pose in objects)
        interfaces: List[ContactInterface] = []
        for i in range(len(placed)):
            for j in range(i + 1, len(placed)):
                if placed[i].fixed and placed[j].fixed:
                    continue
                for iface in interfaces_between(placed[i].world, placed[j].world, contact_tol):
                    interfaces.append(_orient(iface.with_bodies(i, j), placed))
        assembly = cls(placed, (), tuple(interfaces), np.asarray(gravity, dtype=float))
        contacts = [c for iface in interfaces for c in iface.contacts(assembly.pair_mu(*iface.bodies))]
        return cls(placed, tuple(contacts), tuple(interfaces), assembly.gravity)

    def with_object(
        self, obj: PolyObject, pose: Pose, interfaces: Sequence[ContactInterface], contacts: Sequence[ContactPoint]
    ) -> "Assembly":
        return Assembly(
            self.placed + (PlacedObject.at(obj, pose),),
            self.contacts + tuple(contacts),
            self.interfaces + tuple(interfaces),
            self.gravity,
        )

    def pair_mu(self, a: int, b: int) -> float:
        return min(self.placed[a].obj.mu, self.placed[b].obj.mu)

    def non_fixed_ids(self) -> List[int]:
        return [i for i, p in enumerate(self.placed) if not p.fixed]

    def fixed_ids(self) -> List[int]:
        return [i for i, p in enumerate(self.placed) if p.fixed]

    def contact_indices(self, body: int) -> List[int]:
        return [k for k, c in enumerate(self.contacts) if c.touches(body)]

    @property
    def total_weight(self) -> float:
        g = float(np.linalg.norm(self.gravity))
        return sum(self.placed[i].obj.mass * g for i in self.non_fixed_ids())

    def vertices(self, movable_only: bool = True) -> np.ndarray:
        ids = self.non_fixed_ids() if movable_only else range(len(self.placed))
        chunks = [self.placed[i].world.vertices for i in ids]
        return np.vstack(chunks) if chunks else np.zeros((0, 3))

    def scale_and_centroid(self) -> Tuple[float, np.ndarray]:
        """Bounding-sphere radius and centre of the movable objects (all objects when none)."""
        pts = self.vertices(movable_only=True)
        if len(pts) == 0:
            pts = self.vertices(movable_only=False)
        lo, hi = pts.min(axis=0), pts.max(axis=0)
        centre = 0.5 * (lo + hi)
        return max(float(np.linalg.norm(pts - centre, axis=1).max()), 1e-9), centre

    def volume(self) -> float:
        """Oriented bounding-box volume of the movable objects."""
        pts = self.vertices(movable_only=True)
        return oriented_box_volume(pts) if len(pts) >= 4 else 0.0

    def bounds(self, movable_only: bool = True) -> Tuple[np.ndarray, np.ndarray]:
        pts = self.vertices(movable_only)
        if len(pts) == 0:
            pts = self.vertices(movable_only=False)
        return pts.min(axis=0), pts.max(axis=0)


def _orient(iface: ContactInterface, placed: Sequence[PlacedObject]) -> ContactInterface:
    """Make the fixed (or lower) body the supporting one."""
    a, b = iface.bodies
    if placed[a].fixed:
        return iface
    if placed[b].fixed:
        return iface.flipped()
    # the supporting body's face looks up into the supported one
    if iface.normal[2] < -1e-9:
        return iface.flipped()
    return iface
