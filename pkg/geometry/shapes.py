"""Procedural triangle meshes used by scene generators and tests.

Every builder returns a ``PolyMesh`` centred on the origin of its own frame
(boxes, frusta and prisms span z in [-h/2, h/2]; the bowl rests on z = 0).
"""

from __future__ import annotations

from typing import Dict, List, Sequence, Tuple

import numpy as np

from geometry.mesh import PolyMesh, extract_features


def frustum(bottom: Sequence[float], top: Sequence[float], height: float) -> PolyMesh:
    """Rectangular frustum; ``bottom``/``top`` are (x, y) side lengths."""
    bx, by = (0.5 * float(s) for s in bottom)
    tx, ty = (0.5 * float(s) for s in top)
    h = 0.5 * float(height)
    if min(bx, by, tx, ty, h) <= 0:
        raise ValueError("frustum dimensions must be positive")
    vertices = [
        (-bx, -by, -h), (bx, -by, -h), (bx, by, -h), (-bx, by, -h),
        (-tx, -ty, h), (tx, -ty, h), (tx, ty, h), (-tx, ty, h),
    ]
    triangles = [
        (0, 2, 1), (0, 3, 2),  # bottom
        (4, 5, 6), (4, 6, 7),  # top
        (0, 1, 5), (0, 5, 4),
        (1, 2, 6), (1, 6, 5),
        (2, 3, 7), (2, 7, 6),
        (3, 0, 4), (3, 4, 7),
    ]
    return extract_features(vertices, triangles)


def box(extents: Sequence[float]) -> PolyMesh:
    x, y, z = (float(e) for e in extents)
    return frustum((x, y), (x, y), z)


def prism(polygon: Sequence[Sequence[float]], height: float, apex: int = 0) -> PolyMesh:
    """Extrude a counter-clockwise polygon along z.

    Caps are fanned from vertex ``apex``; the polygon must be star-shaped
    with respect to it (true for convex polygons and for an L from its
    reflex corner).
    """
    poly = np.asarray(polygon, dtype=float)
    n = len(poly)
    if n < 3:
        raise ValueError("prism needs a polygon with at least 3 vertices")
    h = 0.5 * float(height)
    vertices = [(x, y, -h) for x, y in poly] + [(x, y, h) for x, y in poly]
    triangles: List[Tuple[int, int, int]] = []
    order = [(apex + k) % n for k in range(n)]
    for k in range(1, n - 1):
        a, b, c = order[0], order[k], order[k + 1]
        triangles.append((a, c, b))
        triangles.append((n + a, n + b, n + c))
    for k in range(n):
        j = (k + 1) % n
        triangles.append((k, j, n + j))
        triangles.append((k, n + j, n + k))
    return extract_features(vertices, triangles)


def icosphere(radius: float = 0.5, subdivisions: int = 1) -> PolyMesh:
    t = (1.0 + 5.0 ** 0.5) / 2.0
    verts = [
        (-1, t, 0), (1, t, 0), (-1, -t, 0), (1, -t, 0),
        (0, -1, t), (0, 1, t), (0, -1, -t), (0, 1, -t),
        (t, 0, -1), (t, 0, 1), (-t, 0, -1), (-t, 0, 1),
    ]
    points: List[np.ndarray] = [np.asarray(v, dtype=float) / np.linalg.norm(v) for v in verts]
    faces = [
        (0, 11, 5), (0, 5, 1), (0, 1, 7), (0, 7, 10), (0, 10, 11),
        (1, 5, 9), (5, 11, 4), (11, 10, 2), (10, 7, 6), (7, 1, 8),
        (3, 9, 4), (3, 4, 2), (3, 2, 6), (3, 6, 8), (3, 8, 9),
        (4, 9, 5), (2, 4, 11), (6, 2, 10), (8, 6, 7), (9, 8, 1),
    ]
    for _ in range(subdivisions):
        cache: Dict[Tuple[int, int], int] = {}

        def midpoint(a: int, b: int) -> int:
            key = (min(a, b), max(a, b))
            if key not in cache:
                m = points[a] + points[b]
                points.append(m / np.linalg.norm(m))
                cache[key] = len(points) - 1
            return cache[key]

        refined = []
        for a, b, c in faces:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            refined += [(a, ab, ca), (b, bc, ab), (c, ca, bc), (ab, bc, ca)]
        faces = refined
    return extract_features(np.array(points) * radius, faces)


def bowl_resolution(vertex_budget: int) -> Tuple[int, int]:
    """(rings, segments) whose bowl vertex count 2*rings*segments + 2 is closest to the budget."""
    if vertex_budget < 26:
        raise ValueError("bowl needs a vertex budget of at least 26")
    per_side = (vertex_budget - 2) / 2.0
    rings = max(2, int(round((per_side / 3.0) ** 0.5)))
    segments = max(6, int(round(per_side / rings)))
    return rings, segments


def bowl(vertex_budget: int, radius: float = 0.5, thickness: float = 0.05, flat_deg: float = 30.0) -> PolyMesh:
    """Hemispherical shell with a flattened bottom and a flat annular rim.

    Vertex count is ``2 * rings * segments + 2`` for the resolution chosen by
    :func:`bowl_resolution`.
    """
    rings, segments = bowl_resolution(vertex_budget)
    inner = radius - thickness
    theta0 = np.radians(flat_deg)
    thetas = theta0 + (np.pi / 2 - theta0) * np.arange(rings) / (rings - 1)
    phis = 2 * np.pi * np.arange(segments) / segments
    lift = radius * np.cos(theta0)

    def ring_points(r: float) -> np.ndarray:
        st, ct = np.sin(thetas)[:, None], np.cos(thetas)[:, None]
        x = r * st * np.cos(phis)[None, :]
        y = r * st * np.sin(phis)[None, :]
        z = np.broadcast_to(-r * ct + lift, x.shape)
        return np.stack([x, y, z], axis=-1).reshape(-1, 3)

    outer_pts = ring_points(radius)
    inner_pts = ring_points(inner)
    vertices = np.vstack(
        [
            outer_pts,
            inner_pts,
            [[0.0, 0.0, -radius * np.cos(theta0) + lift]],
            [[0.0, 0.0, -inner * np.cos(theta0) + lift]],
        ]
    )
    per = rings * segments

    def O(k: int, j: int) -> int:
        return k * segments + j % segments

    def I(k: int, j: int) -> int:
        return per + k * segments + j % segments

    c_out, c_in = 2 * per, 2 * per + 1
    tris: List[Tuple[int, int, int]] = []
    top = rings - 1
    for j in range(segments):
        tris.append((c_out, O(0, j + 1), O(0, j)))
        tris.append((c_in, I(0, j), I(0, j + 1)))
        for k in range(rings - 1):
            tris.append((O(k, j), O(k, j + 1), O(k + 1, j + 1)))
            tris.append((O(k, j), O(k + 1, j + 1), O(k + 1, j)))
            tris.append((I(k, j), I(k + 1, j + 1), I(k, j + 1)))
            tris.append((I(k, j), I(k + 1, j), I(k + 1, j + 1)))
        tris.append((O(top, j), O(top, j + 1), I(top, j + 1)))
        tris.append((O(top, j), I(top, j + 1), I(top, j)))
    return extract_features(vertices, tris)
