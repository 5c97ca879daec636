from __future__ import annotations

from dataclasses import dataclass
from typing import Tuple

import numpy as np

from geometry.primitives import unit

FRAME_DEGENERATE = 1e-6


@dataclass(frozen=True)
class ContactPoint:
    """Point contact between two bodies.

    ``normal`` points from the supporting body into the supported body;
    ``bodies`` is (supporting id, supported id). The frame (u, v, n) is
    right-handed.
    """

    position: np.ndarray
    normal: np.ndarray
    tangent_u: np.ndarray
    tangent_v: np.ndarray
    mu: float
    bodies: Tuple[int, int]

    @property
    def frame(self) -> np.ndarray:
        """C with columns (u, v, n): world = C @ local."""
        return np.column_stack([self.tangent_u, self.tangent_v, self.normal])

    def to_local(self, vector) -> np.ndarray:
        return self.frame.T @ np.asarray(vector, dtype=float)

    def touches(self, body: int) -> bool:
        return body in self.bodies


def tangent_frame(normal) -> Tuple[np.ndarray, np.ndarray]:
    """u = world x projected on the contact plane (world y when degenerate), v = n x u."""
    n = unit(normal)
    for axis in (np.array([1.0, 0.0, 0.0]), np.array([0.0, 1.0, 0.0])):
        u = axis - (axis @ n) * n
        norm = np.linalg.norm(u)
        if norm > FRAME_DEGENERATE:
            u = u / norm
            return u, np.cross(n, u)
    raise ValueError("cannot build a tangent frame")  # unreachable for unit n


def make_contact(position, normal, mu: float, bodies: Tuple[int, int]) -> ContactPoint:
    if mu < 0:
        raise ValueError("friction coefficient must be non-negative")
    n = unit(normal)
    u, v = tangent_frame(n)
    return ContactPoint(np.asarray(position, dtype=float), n, u, v, float(mu), (int(bodies[0]), int(bodies[1])))
