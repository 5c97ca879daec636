"""Planes, lines, poses and the closed-form primitives built on them.

All functions are pure and work on plain ``numpy`` arrays; the small frozen
dataclasses only bundle the arrays with their invariants.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.transform import Rotation

from errors import NoIntersection, ParallelLines, ParallelPlanes

# sine of the angle below which two directions count as parallel
PARALLEL_SIN = 1e-8
UNIT_TOL = 1e-9


def unit(v) -> np.ndarray:
    v = np.asarray(v, dtype=float)
    n = np.linalg.norm(v)
    if n == 0.0:
        raise ValueError("zero-length vector has no direction")
    return v / n


def skew(v) -> np.ndarray:
    """Matrix [v]x such that skew(v) @ w == cross(v, w)."""
    x, y, z = np.asarray(v, dtype=float)
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def any_orthogonal(v) -> np.ndarray:
    """A unit vector orthogonal to v, built from the least aligned world axis."""
    v = unit(v)
    axis = np.zeros(3)
    axis[int(np.argmin(np.abs(v)))] = 1.0
    return unit(np.cross(v, axis))


@dataclass(frozen=True)
class Plane:
    normal: np.ndarray
    offset: float

    def __post_init__(self) -> None:
        n = np.asarray(self.normal, dtype=float)
        if abs(np.linalg.norm(n) - 1.0) > UNIT_TOL:
            raise ValueError("plane normal must be unit length")
        object.__setattr__(self, "normal", n)
        object.__setattr__(self, "offset", float(self.offset))

    @classmethod
    def through(cls, point, normal) -> "Plane":
        n = unit(normal)
        return cls(n, float(n @ np.asarray(point, dtype=float)))

    def residual(self, p) -> float:
        return float(self.normal @ np.asarray(p, dtype=float) - self.offset)


@dataclass(frozen=True)
class Line:
    origin: np.ndarray
    direction: np.ndarray

    def __post_init__(self) -> None:
        u = np.asarray(self.direction, dtype=float)
        if abs(np.linalg.norm(u) - 1.0) > UNIT_TOL:
            raise ValueError("line direction must be unit length")
        object.__setattr__(self, "origin", np.asarray(self.origin, dtype=float))
        object.__setattr__(self, "direction", u)

    def at(self, t: float) -> np.ndarray:
        return self.origin + t * self.direction


@dataclass(frozen=True)
class Pose:
    """Rigid transform x_world = rotation @ x_object + translation."""

    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self) -> None:
        R = np.asarray(self.rotation, dtype=float).reshape(3, 3)
        t = np.asarray(self.translation, dtype=float).reshape(3)
        if np.abs(R.T @ R - np.eye(3)).max() > 1e-6 or abs(np.linalg.det(R) - 1.0) > 1e-6:
            raise ValueError("rotation must be orthonormal with det +1")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @classmethod
    def identity(cls) -> "Pose":
        return cls(np.eye(3), np.zeros(3))

    @classmethod
    def from_quaternion(cls, quat_xyzw, translation) -> "Pose":
        return cls(Rotation.from_quat(quat_xyzw).as_matrix(), translation)

    def quaternion(self) -> np.ndarray:
        """Unit quaternion (x, y, z, w) with w >= 0."""
        q = Rotation.from_matrix(self.rotation).as_quat()
        return -q if q[3] < 0 else q

    def apply(self, points) -> np.ndarray:
        return np.asarray(points, dtype=float) @ self.rotation.T + self.translation

    def apply_vectors(self, vectors) -> np.ndarray:
        return np.asarray(vectors, dtype=float) @ self.rotation.T

    def inverse(self) -> "Pose":
        return Pose(self.rotation.T, -self.rotation.T @ self.translation)

    def compose(self, other: "Pose") -> "Pose":
        """self ∘ other: apply other first."""
        return Pose(self.rotation @ other.rotation, self.rotation @ other.translation + self.translation)

    def matrix(self) -> np.ndarray:
        T = np.eye(4)
        T[:3, :3] = self.rotation
        T[:3, 3] = self.translation
        return T


def project_point_to_plane(p, plane: Plane) -> np.ndarray:
    """o = d n + p - (p·n) n."""
    p = np.asarray(p, dtype=float)
    n = plane.normal
    return plane.offset * n + p - (p @ n) * n


def project_point_to_line(p, line: Line) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    u = line.direction
    return line.origin + ((p - line.origin) @ u) * u


def closest_points_between_lines(e1: Line, e2: Line) -> tuple[float, float]:
    """Parameters (t1, t2) of the mutually closest points of two non-parallel lines."""
    u1, u2 = e1.direction, e2.direction
    if np.linalg.norm(np.cross(u1, u2)) <= PARALLEL_SIN:
        raise ParallelLines("lines are parallel")
    r = e1.origin - e2.origin
    b = u1 @ u2
    c = u1 @ r
    f = u2 @ r
    denom = 1.0 - b * b
    t1 = (b * f - c) / denom
    t2 = (f - b * c) / denom
    return float(t1), float(t2)


def plane_plane_intersection(p1: Plane, p2: Plane) -> Line:
    n1, n2 = p1.normal, p2.normal
    direction = np.cross(n1, n2)
    s = np.linalg.norm(direction)
    if s <= PARALLEL_SIN:
        raise ParallelPlanes("planes are parallel")
    direction = direction / s
    # point on both planes closest to the origin
    A = np.vstack([n1, n2, direction])
    origin = np.linalg.solve(A, np.array([p1.offset, p2.offset, 0.0]))
    return Line(origin, direction)


def line_plane_intersection(line: Line, plane: Plane) -> tuple[float, np.ndarray]:
    """t = (d - n·p_e) / (n·u_e)."""
    denom = plane.normal @ line.direction
    if abs(denom) <= PARALLEL_SIN:
        raise NoIntersection("line is parallel to the plane")
    t = (plane.offset - plane.normal @ line.origin) / denom
    return float(t), line.at(t)


def rotation_between_vectors(a, b) -> np.ndarray:
    """Rodrigues rotation taking unit a onto unit b.

    For a == -b the axis is undefined; the rotation is then 180 degrees about
    ``any_orthogonal(a)``.
    """
    a = unit(a)
    b = unit(b)
    axis = np.cross(a, b)
    s = np.linalg.norm(axis)
    c = float(a @ b)
    if s < 1e-12:
        if c > 0.0:
            return np.eye(3)
        k = any_orthogonal(a)
        return 2.0 * np.outer(k, k) - np.eye(3)
    K = skew(axis / s)
    return np.eye(3) + s * K + (1.0 - c) * (K @ K)


def rotation_about(axis, angle: float) -> np.ndarray:
    return Rotation.from_rotvec(unit(axis) * angle).as_matrix()


def orthonormalize(R) -> np.ndarray:
    """Nearest rotation matrix (polar decomposition through SVD)."""
    U, _, Vt = np.linalg.svd(np.asarray(R, dtype=float))
    D = np.diag([1.0, 1.0, np.sign(np.linalg.det(U @ Vt))])
    return U @ D @ Vt
