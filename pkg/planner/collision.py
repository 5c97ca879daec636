"""Penetration test between a posed object and the assembly.

Contact within ``penetration_tol`` is allowed. Two meshes penetrate when a
probe point of one (vertices, edge midpoints, face centroids and face
centroids pushed slightly inward) lies inside the other deeper than the
tolerance, or when an edge of one crosses a triangle of the other with both
endpoints clearly on opposite sides.
"""

from __future__ import annotations

from typing import TYPE_CHECKING

import numpy as np

from geometry.mesh import PolyMesh

if TYPE_CHECKING:
    from scene.assembly import Assembly

BARY_MARGIN = 1e-7


def winding_numbers(points, mesh: PolyMesh) -> np.ndarray:
    """Generalised winding number of a closed outward mesh around each point (solid angles)."""
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    tri = mesh.triangle_points()
    a = tri[None, :, 0, :] - P[:, None, :]
    b = tri[None, :, 1, :] - P[:, None, :]
    c = tri[None, :, 2, :] - P[:, None, :]
    la, lb, lc = (np.linalg.norm(x, axis=2) for x in (a, b, c))
    num = np.einsum("kmj,kmj->km", a, np.cross(b, c))
    den = (
        la * lb * lc
        + np.einsum("kmj,kmj->km", a, b) * lc
        + np.einsum("kmj,kmj->km", a, c) * lb
        + np.einsum("kmj,kmj->km", b, c) * la
    )
    return (2.0 * np.arctan2(num, den)).sum(axis=1) / (4.0 * np.pi)


def _segment_distance(P: np.ndarray, A: np.ndarray, B: np.ndarray) -> np.ndarray:
    ab = B - A
    ap = P[:, None, :] - A[None, :, :]
    denom = np.maximum(np.einsum("mj,mj->m", ab, ab), 1e-300)
    t = np.clip(np.einsum("kmj,mj->km", ap, ab) / denom, 0.0, 1.0)
    closest = A[None, :, :] + t[..., None] * ab[None, :, :]
    return np.linalg.norm(P[:, None, :] - closest, axis=2)


def surface_distance(points, mesh: PolyMesh) -> np.ndarray:
    """Unsigned distance from each point to the mesh surface."""
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    tri = mesh.triangle_points()
    v0, v1, v2 = tri[:, 0], tri[:, 1], tri[:, 2]
    n = np.cross(v1 - v0, v2 - v0)
    n = n / np.linalg.norm(n, axis=1, keepdims=True)
    rel = P[:, None, :] - v0[None, :, :]
    height = np.einsum("kmj,mj->km", rel, n)
    foot = P[:, None, :] - height[..., None] * n[None, :, :]
    inside = np.ones(height.shape, dtype=bool)
    for s, e in ((v0, v1), (v1, v2), (v2, v0)):
        inside &= np.einsum("kmj,mj->km", np.cross(e - s, foot - s[None, :, :]), n) >= 0.0
    edge_d = np.minimum(
        np.minimum(_segment_distance(P, v0, v1), _segment_distance(P, v1, v2)), _segment_distance(P, v2, v0)
    )
    return np.where(inside, np.abs(height), edge_d).min(axis=1)


def probe_points(mesh: PolyMesh, depth: float) -> np.ndarray:
    edges = [0.5 * (e.start + e.end) for e in mesh.edges]
    centroids = np.array([f.centroid for f in mesh.faces])
    lo, hi = mesh.bounds
    depth = min(depth, 0.25 * float((hi - lo).min()))
    pushed = centroids - depth * np.array([f.normal for f in mesh.faces])
    return np.vstack([mesh.vertices, np.array(edges).reshape(-1, 3), centroids, pushed])


def _points_inside(points: np.ndarray, mesh: PolyMesh, tol: float) -> bool:
    lo, hi = mesh.bounds
    near = np.all((points >= lo + tol) & (points <= hi - tol), axis=1)
    if not near.any():
        return False
    candidates = points[near]
    inside = winding_numbers(candidates, mesh) > 0.5
    if not inside.any():
        return False
    return bool(np.any(surface_distance(candidates[inside], mesh) > tol))


def _edges_cross(mesh_e: PolyMesh, mesh_t: PolyMesh, tol: float) -> bool:
    tri = mesh_t.triangle_points()
    v0, v1, v2 = tri[:, 0], tri[:, 1], tri[:, 2]
    n = np.cross(v1 - v0, v2 - v0)
    n = n / np.linalg.norm(n, axis=1, keepdims=True)
    T = mesh_e.triangles
    pairs = np.unique(np.sort(np.vstack([T[:, [0, 1]], T[:, [1, 2]], T[:, [2, 0]]]), axis=1), axis=0)
    S = mesh_e.vertices[pairs[:, 0]]
    E = mesh_e.vertices[pairs[:, 1]]
    lo, hi = mesh_t.bounds
    keep = np.all((np.minimum(S, E) <= hi + tol) & (np.maximum(S, E) >= lo - tol), axis=1)
    if not keep.any():
        return False
    S, E = S[keep], E[keep]
    ds = np.einsum("kj,mj->km", S, n) - np.einsum("mj,mj->m", v0, n)[None, :]
    de = np.einsum("kj,mj->km", E, n) - np.einsum("mj,mj->m", v0, n)[None, :]
    crossing = ((ds > tol) & (de < -tol)) | ((ds < -tol) & (de > tol))
    if not crossing.any():
        return False
    ks, ms = np.nonzero(crossing)
    t = ds[ks, ms] / (ds[ks, ms] - de[ks, ms])
    X = S[ks] + t[:, None] * (E[ks] - S[ks])
    a, b, c = v0[ms], v1[ms], v2[ms]
    area = np.einsum("kj,kj->k", np.cross(b - a, c - a), n[ms])
    w0 = np.einsum("kj,kj->k", np.cross(b - X, c - X), n[ms]) / area
    w1 = np.einsum("kj,kj->k", np.cross(c - X, a - X), n[ms]) / area
    w2 = 1.0 - w0 - w1
    return bool(np.any((w0 > BARY_MARGIN) & (w1 > BARY_MARGIN) & (w2 > BARY_MARGIN)))


def meshes_penetrate(mesh_a: PolyMesh, mesh_b: PolyMesh, tol: float) -> bool:
    lo_a, hi_a = mesh_a.bounds
    lo_b, hi_b = mesh_b.bounds
    if np.any(lo_a >= hi_b - tol) or np.any(lo_b >= hi_a - tol):
        return False
    depth = 10.0 * tol
    if _points_inside(probe_points(mesh_a, depth), mesh_b, tol):
        return True
    if _points_inside(probe_points(mesh_b, depth), mesh_a, tol):
        return True
    return _edges_cross(mesh_a, mesh_b, tol) or _edges_cross(mesh_b, mesh_a, tol)


def detect_collisions(mesh: PolyMesh, assembly: "Assembly", penetration_tol: float) -> bool:
    """True if the world-frame ``mesh`` penetrates any assembly object beyond the tolerance."""
    return any(meshes_penetrate(mesh, placed.world, penetration_tol) for placed in assembly.placed)
