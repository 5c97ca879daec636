"""Object features that can realise two sampled scene contacts.

Given scene samples a and b (positions, outward normals, separation L) the
object is searched for a feature pair: feature 1 must afford a, feature 2
must afford b once feature 1 is aligned with a. For each accepted pair the
object points q (on feature 1) and r (on feature 2) are chosen in closed form
with ||q - r|| = L and the q-r segment passing as close to the centre of mass
as the pair allows.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import List, Sequence, Tuple

import numpy as np

from errors import DegenerateTriangle, NoIntersection, ParallelLines, ParallelPlanes, TooFarApart
from geometry.mesh import Edge, Face, PolyMesh
from geometry.primitives import (
    Line,
    Plane,
    closest_points_between_lines,
    line_plane_intersection,
    plane_plane_intersection,
    project_point_to_line,
    project_point_to_plane,
    rotation_between_vectors,
    unit,
)

COPLANAR = "FaceFace-Coplanar"
FACES_INTERSECTING = "FaceFace-Intersecting"
FACE_EDGE_INTERSECTING = "FaceEdge-Intersecting"
FACE_EDGE_PARALLEL = "FaceEdge-Parallel"
EDGES_PARALLEL = "EdgeEdge-Parallel"
EDGES_INTERSECTING = "EdgeEdge-Intersecting"
EDGES_SKEW = "EdgeEdge-Skew"
PAIR_KINDS = (
    COPLANAR,
    FACES_INTERSECTING,
    FACE_EDGE_INTERSECTING,
    FACE_EDGE_PARALLEL,
    EDGES_PARALLEL,
    EDGES_INTERSECTING,
    EDGES_SKEW,
)

AFFORD_TOL_DEG = 1.0
COPLANAR_TOL = 1e-6
DEGENERATE_TOL = 1e-9

Feature = Tuple[str, int]


@dataclass(frozen=True)
class SceneContactSample:
    position: np.ndarray
    normal: np.ndarray
    owner: int
    face: int


@dataclass(frozen=True)
class FeaturePair:
    kind: str
    feature1: Feature
    feature2: Feature
    normal1: np.ndarray
    q: np.ndarray | None = None
    r: np.ndarray | None = None
    L: float = 0.0


def relative_scene_rotation(n_a, n_b) -> np.ndarray:
    return rotation_between_vectors(n_a, n_b)


def face_affords_face(face_normal, required, tol_deg: float = AFFORD_TOL_DEG) -> bool:
    return float(np.dot(face_normal, required)) < -1.0 + (1.0 - math.cos(math.radians(tol_deg)))


def face_affords_edge(normal, edge: Edge, tol_deg: float = AFFORD_TOL_DEG) -> bool:
    """True iff ``normal`` is orthogonal to the edge and lies between its faces.

    u, v, w are the components along the edge direction of s1 x s2, n x s2
    and n x s1; the normal is between the sides when uv <= 0 and uw >= 0.
    """
    n = np.asarray(normal, dtype=float)
    e = edge.direction
    if abs(float(e @ n)) > math.sin(math.radians(tol_deg)):
        return False
    u = float(e @ np.cross(edge.side1, edge.side2))
    v = float(e @ np.cross(n, edge.side2))
    w = float(e @ np.cross(n, edge.side1))
    return u * v <= 1e-12 and u * w >= -1e-12


def feature_normal(mesh: PolyMesh, feature: Feature) -> np.ndarray:
    kind, idx = feature
    return mesh.faces[idx].normal if kind == "face" else mesh.edges[idx].bisector


def _features(mesh: PolyMesh) -> List[Feature]:
    return [("face", f.index) for f in mesh.faces] + [("edge", e.index) for e in mesh.edges if e.convex]


def _edge_normals_at_angle(edge: Edge, m1: np.ndarray, alpha: float, tol_deg: float) -> List[np.ndarray]:
    """Unit vectors orthogonal to the edge at angle alpha from m1."""
    e = edge.direction
    perp = m1 - (m1 @ e) * e
    rho = float(np.linalg.norm(perp))
    cos_a = math.cos(alpha)
    if rho < 1e-9:
        return [edge.bisector] if abs(cos_a) <= math.sin(math.radians(tol_deg)) else []
    c = cos_a / rho
    if abs(c) > 1.0 + math.sin(math.radians(tol_deg)):
        return []
    phi = math.acos(max(-1.0, min(1.0, c)))
    base = perp / rho
    side = np.cross(e, base)
    return [math.cos(phi) * base + math.sin(phi) * side, math.cos(phi) * base - math.sin(phi) * side]


def _feature2_affords(
    mesh: PolyMesh, feature: Feature, m1: np.ndarray, alpha: float, tol_deg: float
) -> bool:
    kind, idx = feature
    if kind == "face":
        angle = math.acos(max(-1.0, min(1.0, float(mesh.faces[idx].normal @ m1))))
        return abs(angle - alpha) <= math.radians(tol_deg)
    edge = mesh.edges[idx]
    return any(face_affords_edge(w, edge, tol_deg) for w in _edge_normals_at_angle(edge, m1, alpha, tol_deg))


def _classify(mesh: PolyMesh, f1: Feature, f2: Feature) -> str | None:
    tol = math.sin(math.radians(AFFORD_TOL_DEG))
    if f1[0] == "face" and f2[0] == "face":
        a, b = mesh.faces[f1[1]], mesh.faces[f2[1]]
        if np.linalg.norm(np.cross(a.normal, b.normal)) <= tol:
            if a.normal @ b.normal > 0 and abs(a.offset - b.offset) <= COPLANAR_TOL:
                return COPLANAR
            return None
        return FACES_INTERSECTING
    if f1[0] == "edge" and f2[0] == "edge":
        e1, e2 = mesh.edges[f1[1]].line, mesh.edges[f2[1]].line
        if np.linalg.norm(np.cross(e1.direction, e2.direction)) <= tol:
            return EDGES_PARALLEL
        t1, t2 = closest_points_between_lines(e1, e2)
        gap = np.linalg.norm(e1.at(t1) - e2.at(t2))
        return EDGES_INTERSECTING if gap <= COPLANAR_TOL else EDGES_SKEW
    face = mesh.faces[f1[1] if f1[0] == "face" else f2[1]]
    edge = mesh.edges[f2[1] if f2[0] == "edge" else f1[1]]
    if abs(face.normal @ edge.direction) > tol:
        return FACE_EDGE_INTERSECTING
    return FACE_EDGE_PARALLEL


def enumerate_feature_pairs(
    mesh: PolyMesh, a: SceneContactSample, b: SceneContactSample, L: float, tol_deg: float = AFFORD_TOL_DEG
) -> List[FeaturePair]:
    """Ordered feature pairs able to host contacts a (feature 1) and b (feature 2).

    Feature 1 is aligned so its normal opposes n_a; the remaining roll about
    n_a is free, so feature 2 qualifies when some roll makes it oppose n_b,
    i.e. when its normal sits at the scene angle between n_a and n_b.
    """
    R_ba = relative_scene_rotation(a.normal, b.normal)
    alpha = math.acos(max(-1.0, min(1.0, (np.trace(R_ba) - 1.0) / 2.0)))
    feats = _features(mesh)
    out: List[FeaturePair] = []
    for f1 in feats:
        m1 = feature_normal(mesh, f1)
        if f1[0] == "edge" and not face_affords_edge(m1, mesh.edges[f1[1]], tol_deg):
            continue
        for f2 in feats:
            if not _feature2_affords(mesh, f2, m1, alpha, tol_deg):
                continue
            kind = _classify(mesh, f1, f2)
            if kind is None:
                continue
            out.append(FeaturePair(kind, f1, f2, m1, L=L))
    return out


# ---------------------------------------------------------------------------
# point selection


def _similar_triangle(o0, o1, o2, L: float) -> Tuple[np.ndarray, np.ndarray]:
    base = float(np.linalg.norm(o1 - o2))
    if base <= DEGENERATE_TOL:
        raise DegenerateTriangle("centre of mass lies on the apex line")
    k = L / base
    return o0 + k * (o1 - o0), o0 + k * (o2 - o0)


def _principal_in_plane(points: np.ndarray, normal: np.ndarray) -> np.ndarray:
    flat = points - np.outer(points @ normal, normal)
    flat = flat - flat.mean(axis=0)
    _, _, vt = np.linalg.svd(flat, full_matrices=False)
    u = vt[0] - (vt[0] @ normal) * normal
    if np.linalg.norm(u) < 1e-9:
        u = np.cross(normal, [1.0, 0.0, 0.0])
        if np.linalg.norm(u) < 1e-9:
            u = np.cross(normal, [0.0, 1.0, 0.0])
    u = unit(u)
    # fix the sign so equal inputs give equal outputs
    lead = u[np.argmax(np.abs(u) > 1e-12)]
    return u if lead > 0 else -u


def match_face_face_coplanar(plane: Plane, com, L: float, vertices) -> Tuple[np.ndarray, np.ndarray]:
    o1 = project_point_to_plane(com, plane)
    u = _principal_in_plane(np.asarray(vertices, dtype=float), plane.normal)
    return o1 + 0.5 * L * u, o1 - 0.5 * L * u


def match_face_face_intersecting(p1: Plane, p2: Plane, com, L: float) -> Tuple[np.ndarray, np.ndarray]:
    edge = plane_plane_intersection(p1, p2)
    o0 = project_point_to_line(com, edge)
    o1 = project_point_to_plane(com, p1)
    o2 = project_point_to_plane(com, p2)
    return _similar_triangle(o0, o1, o2, L)


def match_face_edge(plane: Plane, edge: Line, com, L: float, parallel: bool) -> Tuple[np.ndarray, np.ndarray]:
    """(q on the face plane, r on the edge line)."""
    com = np.asarray(com, dtype=float)
    o1 = project_point_to_plane(com, plane)
    o2 = project_point_to_line(com, edge)
    if not parallel:
        _, o0 = line_plane_intersection(edge, plane)
        return _similar_triangle(o0, o1, o2, L)
    o3 = project_point_to_plane(o2, plane)
    h2 = float(np.sum((o3 - o2) ** 2))
    if L * L < h2 - 1e-15:
        raise TooFarApart(f"edge is {math.sqrt(h2):.4g} m from the face, separation {L:.4g} m")
    reach = math.sqrt(max(0.0, L * L - h2))
    toward = o1 - o3
    if np.linalg.norm(toward) <= DEGENERATE_TOL:
        toward = edge.direction
    return o3 + reach * unit(toward), o2


def match_edge_edge(e1: Line, e2: Line, com, L: float, kind: str) -> Tuple[np.ndarray, np.ndarray]:
    com = np.asarray(com, dtype=float)
    o1 = project_point_to_line(com, e1)
    o2 = project_point_to_line(com, e2)
    if kind == EDGES_PARALLEL:
        d2 = float(np.sum((o1 - o2) ** 2))
        if L * L < d2:
            return o1, o2
        half = 0.5 * math.sqrt(L * L - d2)
        return o1 + half * e1.direction, o2 - half * e1.direction
    t1, t2 = closest_points_between_lines(e1, e2)
    p1, p2 = e1.at(t1), e2.at(t2)
    if kind == EDGES_INTERSECTING:
        return _similar_triangle(0.5 * (p1 + p2), o1, o2, L)
    g2 = float(np.sum((p1 - p2) ** 2))
    if g2 > L * L:
        raise TooFarApart(f"edges are {math.sqrt(g2):.4g} m apart, separation {L:.4g} m")
    num = math.sqrt(max(0.0, L * L - g2))
    if num == 0.0:
        return p1, p2
    den2 = float(np.sum((o1 - o2) ** 2)) - g2
    if den2 <= DEGENERATE_TOL ** 2:
        raise DegenerateTriangle("centre of mass projects onto the common perpendicular")
    k = num / math.sqrt(den2)
    return p1 + k * (o1 - p1), p2 + k * (o2 - p2)


def match_pair(mesh: PolyMesh, com, pair: FeaturePair) -> FeaturePair:
    """Fill in q and r for an enumerated pair."""
    (k1, i1), (k2, i2) = pair.feature1, pair.feature2
    L = pair.L
    kind = pair.kind
    try:
        if kind == COPLANAR:
            q, r = match_face_face_coplanar(mesh.faces[i1].plane, com, L, mesh.vertices)
        elif kind == FACES_INTERSECTING:
            q, r = match_face_face_intersecting(mesh.faces[i1].plane, mesh.faces[i2].plane, com, L)
        elif kind in (FACE_EDGE_INTERSECTING, FACE_EDGE_PARALLEL):
            parallel = kind == FACE_EDGE_PARALLEL
            if k1 == "face":
                q, r = match_face_edge(mesh.faces[i1].plane, mesh.edges[i2].line, com, L, parallel)
            else:
                r, q = match_face_edge(mesh.faces[i2].plane, mesh.edges[i1].line, com, L, parallel)
        else:
            q, r = match_edge_edge(mesh.edges[i1].line, mesh.edges[i2].line, com, L, kind)
    except (ParallelLines, ParallelPlanes, NoIntersection) as exc:
        raise DegenerateTriangle(str(exc)) from exc
    return FeaturePair(kind, pair.feature1, pair.feature2, pair.normal1, q, r, L)


def pick_pair(pairs: Sequence[FeaturePair], rng: np.random.Generator) -> FeaturePair:
    return pairs[int(rng.integers(len(pairs)))]
