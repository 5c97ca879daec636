"""QuickHull for contact-point sets.

3D point clouds get the classic conflict-list QuickHull; coplanar sets (the
common case, contacts on a table top) are projected onto their best-fit plane
and run through a 2D QuickHull. Coplanar hull facets are merged so the edge
list contains only real hull edges (a cube gives 12, not 18).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, List, Tuple

import numpy as np

from errors import DegenerateHull

# relative distance below which a point counts as lying on a facet
REL_EPS = 1e-9
MERGE_COS = 1.0 - 1e-10


@dataclass(frozen=True)
class ConvexHull:
    points: np.ndarray
    vertices: Tuple[int, ...]
    edges: Tuple[Tuple[int, int], ...]
    planar: bool
    normal: np.ndarray | None = None
    facets: Tuple[Tuple[int, int, int], ...] = field(default_factory=tuple)


def quickhull(points) -> ConvexHull:
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    if len(pts) < 3:
        raise DegenerateHull(f"need at least 3 points, got {len(pts)}")
    scale = max(1.0, float(np.abs(pts).max()))
    eps = REL_EPS * scale

    centered = pts - pts.mean(axis=0)
    _, sv, vt = np.linalg.svd(centered, full_matrices=False)
    if len(sv) < 2 or sv[1] <= eps * np.sqrt(len(pts)):
        raise DegenerateHull("points are collinear")

    i0, i1, i2 = _initial_triangle(pts, eps)
    normal = np.cross(pts[i1] - pts[i0], pts[i2] - pts[i0])
    normal /= np.linalg.norm(normal)
    heights = (pts - pts[i0]) @ normal
    i3 = int(np.argmax(np.abs(heights)))
    if abs(heights[i3]) <= eps:
        return _planar_hull(pts, vt, eps)
    return _hull_3d(pts, (i0, i1, i2, i3), eps)


def _initial_triangle(pts: np.ndarray, eps: float) -> Tuple[int, int, int]:
    extremes = np.concatenate([pts.argmin(axis=0), pts.argmax(axis=0)])
    best, pair = -1.0, (0, 1)
    for a in extremes:
        for b in extremes:
            d = np.linalg.norm(pts[a] - pts[b])
            if d > best:
                best, pair = d, (int(a), int(b))
    i0, i1 = pair
    if best <= eps:
        raise DegenerateHull("all points coincide")
    u = (pts[i1] - pts[i0]) / best
    rel = pts - pts[i0]
    dist = np.linalg.norm(rel - np.outer(rel @ u, u), axis=1)
    i2 = int(np.argmax(dist))
    if dist[i2] <= eps:
        raise DegenerateHull("points are collinear")
    return i0, i1, i2


# ---------------------------------------------------------------------------
# planar case


def _planar_hull(pts: np.ndarray, vt: np.ndarray, eps: float) -> ConvexHull:
    u, v, n = vt[0], vt[1], np.cross(vt[0], vt[1])
    uv = np.column_stack([pts @ u, pts @ v])
    order = _quickhull_2d(uv, eps)
    edges = tuple((order[k], order[(k + 1) % len(order)]) for k in range(len(order)))
    return ConvexHull(pts, tuple(order), edges, planar=True, normal=n / np.linalg.norm(n))


def _quickhull_2d(uv: np.ndarray, eps: float) -> List[int]:
    """Counter-clockwise hull indices; points on hull edges are excluded."""
    left = int(np.lexsort((uv[:, 1], uv[:, 0]))[0])
    right = int(np.lexsort((-uv[:, 1], -uv[:, 0]))[0])
    everything = list(range(len(uv)))
    lower = _hull_side(uv, left, right, everything, eps)
    upper = _hull_side(uv, right, left, everything, eps)
    return [left] + lower + [right] + upper


def _cross2(o, a, b) -> float:
    return float((a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0]))


def _hull_side(uv: np.ndarray, a: int, b: int, candidates: List[int], eps: float) -> List[int]:
    """Hull vertices strictly to the right of a->b, ordered from a to b."""
    length = np.linalg.norm(uv[b] - uv[a])
    outside = []
    for i in candidates:
        if i in (a, b):
            continue
        d = -_cross2(uv[a], uv[b], uv[i]) / length
        if d > eps:
            outside.append((d, i))
    if not outside:
        return []
    _, far = max(outside)
    rest = [i for _, i in outside]
    return _hull_side(uv, a, far, rest, eps) + [far] + _hull_side(uv, far, b, rest, eps)


# ---------------------------------------------------------------------------
# 3D case


class _Facet:
    __slots__ = ("verts", "normal", "offset", "outside", "alive")

    def __init__(self, pts: np.ndarray, verts: Tuple[int, int, int]):
        a, b, c = (pts[i] for i in verts)
        n = np.cross(b - a, c - a)
        self.verts = verts
        self.normal = n / np.linalg.norm(n)
        self.offset = float(self.normal @ a)
        self.outside: List[int] = []
        self.alive = True

    def distance(self, p: np.ndarray) -> float:
        return float(self.normal @ p - self.offset)

    def directed_edges(self):
        a, b, c = self.verts
        return ((a, b), (b, c), (c, a))


def _hull_3d(pts: np.ndarray, simplex: Tuple[int, int, int, int], eps: float) -> ConvexHull:
    i0, i1, i2, i3 = simplex
    centroid = pts[list(simplex)].mean(axis=0)
    facets: List[_Facet] = []
    for tri in ((i0, i1, i2), (i0, i1, i3), (i0, i2, i3), (i1, i2, i3)):
        f = _Facet(pts, tri)
        if f.distance(centroid) > 0:
            f = _Facet(pts, (tri[0], tri[2], tri[1]))
        facets.append(f)

    _assign(pts, [i for i in range(len(pts)) if i not in simplex], facets, eps)

    while True:
        pending = [f for f in facets if f.alive and f.outside]
        if not pending:
            break
        facet = pending[0]
        apex = max(facet.outside, key=lambda i: facet.distance(pts[i]))
        visible = [f for f in facets if f.alive and f.distance(pts[apex]) > eps]
        visible_edges = {e for f in visible for e in f.directed_edges()}
        horizon = [(a, b) for (a, b) in visible_edges if (b, a) not in visible_edges]
        orphans = {i for f in visible for i in f.outside if i != apex}
        for f in visible:
            f.alive = False
        created = [_Facet(pts, (a, b, apex)) for a, b in horizon]
        facets.extend(created)
        _assign(pts, sorted(orphans), created, eps)

    alive = [f for f in facets if f.alive]
    return _merge_facets(pts, alive)


def _assign(pts: np.ndarray, indices, facets: List[_Facet], eps: float) -> None:
    for i in indices:
        for f in facets:
            if f.distance(pts[i]) > eps:
                f.outside.append(i)
                break


def _merge_facets(pts: np.ndarray, facets: List[_Facet]) -> ConvexHull:
    owner: Dict[Tuple[int, int], _Facet] = {}
    for f in facets:
        for e in f.directed_edges():
            owner[e] = f
    edges = set()
    for (a, b), f in owner.items():
        if a > b:
            continue
        g = owner.get((b, a))
        if g is None:
            raise DegenerateHull("hull is not closed")
        if f.normal @ g.normal < MERGE_COS:
            edges.add((a, b))
    vertices = tuple(sorted({i for e in edges for i in e}))
    return ConvexHull(
        pts,
        vertices,
        tuple(sorted(edges)),
        planar=False,
        facets=tuple(f.verts for f in facets),
    )
