"""Polyhedral meshes: planar face merging, feature edges, side vectors.

A ``PolyMesh`` is built from a watertight triangle soup by
:func:`extract_features`. Triangles whose normals agree within
``MERGE_ANGLE_DEG`` and whose vertices stay within ``MERGE_PLANE_TOL`` of the
seed plane are merged into one face; faces keep an outer loop and hole loops.
Feature edges are maximal straight runs of boundary between two faces.
"""

from __future__ import annotations

from collections import defaultdict, deque
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from errors import InvalidMesh
from geometry.primitives import Line, Plane, Pose, any_orthogonal, unit

MERGE_PLANE_TOL = 1e-6
MERGE_ANGLE_DEG = 0.5
COLLINEAR_SIN = 1e-9


@dataclass(frozen=True)
class Face:
    index: int
    normal: np.ndarray
    offset: float
    loop: Tuple[int, ...]
    holes: Tuple[Tuple[int, ...], ...]
    triangles: Tuple[int, ...]
    area: float
    centroid: np.ndarray

    @property
    def plane(self) -> Plane:
        return Plane(self.normal, self.offset)

    def basis(self) -> Tuple[np.ndarray, np.ndarray]:
        """In-plane axes (u, v) with u x v = normal."""
        u = any_orthogonal(self.normal)
        return u, np.cross(self.normal, u)


@dataclass(frozen=True)
class Edge:
    """Feature edge between face1 and face2.

    ``direction`` runs along face2's counter-clockwise loop, so
    ``side1 = direction x normal1`` and ``side2 = normal2 x direction`` both
    point into their faces.
    """

    index: int
    face1: int
    face2: int
    start: np.ndarray
    end: np.ndarray
    direction: np.ndarray
    normal1: np.ndarray
    normal2: np.ndarray
    side1: np.ndarray
    side2: np.ndarray

    @property
    def line(self) -> Line:
        return Line(self.start, self.direction)

    @property
    def length(self) -> float:
        return float(np.linalg.norm(self.end - self.start))

    @property
    def convex(self) -> bool:
        return float(self.side1 @ self.normal2) < 0.0

    @property
    def bisector(self) -> np.ndarray:
        """Normalized average of the two face normals."""
        return unit(self.normal1 + self.normal2)


@dataclass(frozen=True)
class PolyMesh:
    vertices: np.ndarray
    triangles: np.ndarray
    faces: Tuple[Face, ...]
    edges: Tuple[Edge, ...]
    triangle_face: np.ndarray

    @property
    def bounds(self) -> Tuple[np.ndarray, np.ndarray]:
        return self.vertices.min(axis=0), self.vertices.max(axis=0)

    @property
    def surface_area(self) -> float:
        return float(sum(f.area for f in self.faces))

    def triangle_points(self) -> np.ndarray:
        """(m, 3, 3) array of triangle corner coordinates."""
        return self.vertices[self.triangles]

    def radius_about(self, center) -> float:
        return float(np.linalg.norm(self.vertices - np.asarray(center, dtype=float), axis=1).max())

    def loop_points(self, loop) -> np.ndarray:
        return self.vertices[list(loop)]


def _triangle_normals(vertices: np.ndarray, triangles: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    tri = vertices[triangles]
    cross = np.cross(tri[:, 1] - tri[:, 0], tri[:, 2] - tri[:, 0])
    double_area = np.linalg.norm(cross, axis=1)
    if np.any(double_area <= 1e-14):
        raise InvalidMesh("mesh contains zero-area triangles")
    return cross / double_area[:, None], 0.5 * double_area


def _signed_volume(vertices: np.ndarray, triangles: np.ndarray) -> float:
    tri = vertices[triangles]
    return float(np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])).sum() / 6.0)


def _directed_edges(triangles: np.ndarray) -> Dict[Tuple[int, int], int]:
    owner: Dict[Tuple[int, int], int] = {}
    for t, (a, b, c) in enumerate(triangles):
        for e in ((a, b), (b, c), (c, a)):
            e = (int(e[0]), int(e[1]))
            if e in owner:
                raise InvalidMesh(f"edge {e} used twice in the same direction (non-manifold or flipped)")
            owner[e] = t
    for a, b in owner:
        if (b, a) not in owner:
            raise InvalidMesh(f"edge ({a}, {b}) has no twin: mesh is not watertight")
    return owner


def _merge_regions(vertices, triangles, normals, owner) -> List[List[int]]:
    cos_tol = np.cos(np.radians(MERGE_ANGLE_DEG))
    region = -np.ones(len(triangles), dtype=int)
    regions: List[List[int]] = []
    for seed in range(len(triangles)):
        if region[seed] >= 0:
            continue
        n = normals[seed]
        d = float(n @ vertices[triangles[seed][0]])
        rid = len(regions)
        members = [seed]
        region[seed] = rid
        queue = deque([seed])
        while queue:
            t = queue.popleft()
            a, b, c = triangles[t]
            for x, y in ((a, b), (b, c), (c, a)):
                nb = owner[(int(y), int(x))]
                if region[nb] >= 0:
                    continue
                if normals[nb] @ n < cos_tol:
                    continue
                if np.abs(vertices[triangles[nb]] @ n - d).max() > MERGE_PLANE_TOL:
                    continue
                region[nb] = rid
                members.append(nb)
                queue.append(nb)
        regions.append(sorted(members))
    return regions


def _boundary_loops(triangles: np.ndarray, members: List[int]) -> List[List[Tuple[int, int]]]:
    directed = []
    for t in members:
        a, b, c = (int(i) for i in triangles[t])
        directed.extend(((a, b), (b, c), (c, a)))
    inside = set(directed)
    boundary = [e for e in directed if (e[1], e[0]) not in inside]
    nxt: Dict[int, List[Tuple[int, int]]] = defaultdict(list)
    for e in boundary:
        nxt[e[0]].append(e)
    used = set()
    loops = []
    for e in boundary:
        if e in used:
            continue
        loop = []
        cur = e
        while cur not in used:
            used.add(cur)
            loop.append(cur)
            options = [o for o in nxt[cur[1]] if o not in used]
            if not options:
                break
            cur = options[0]
        loops.append(loop)
    return loops


def _loop_area(points: np.ndarray, normal: np.ndarray) -> float:
    total = np.zeros(3)
    for k in range(len(points)):
        total += np.cross(points[k], points[(k + 1) % len(points)])
    return 0.5 * float(total @ normal)


def extract_features(vertices, triangles) -> PolyMesh:
    """Merge a watertight triangle mesh into planar faces and feature edges."""
    V = np.asarray(vertices, dtype=float).reshape(-1, 3)
    T = np.asarray(triangles, dtype=int).reshape(-1, 3)
    if len(T) < 4:
        raise InvalidMesh("a closed mesh needs at least 4 triangles")
    if T.min() < 0 or T.max() >= len(V):
        raise InvalidMesh("triangle index out of range")
    owner = _directed_edges(T)
    if _signed_volume(V, T) < 0:
        T = T[:, ::-1].copy()
        owner = _directed_edges(T)
    normals, areas = _triangle_normals(V, T)
    regions = _merge_regions(V, T, normals, owner)

    triangle_face = np.empty(len(T), dtype=int)
    for fid, members in enumerate(regions):
        triangle_face[members] = fid

    faces: List[Face] = []
    loops_by_face: List[List[List[Tuple[int, int]]]] = []
    for fid, members in enumerate(regions):
        w = areas[members]
        n = unit((normals[members] * w[:, None]).sum(axis=0))
        centroids = V[T[members]].mean(axis=1)
        centroid = (centroids * w[:, None]).sum(axis=0) / w.sum()
        loops = _boundary_loops(T, members)
        signed = [_loop_area(V[[e[0] for e in loop]], n) for loop in loops]
        outer = int(np.argmax(signed))
        ordered = [loops[outer]] + [lp for k, lp in enumerate(loops) if k != outer]
        loops_by_face.append(ordered)
        faces.append(
            Face(
                index=fid,
                normal=n,
                offset=float(n @ centroid),
                loop=tuple(e[0] for e in ordered[0]),
                holes=tuple(tuple(e[0] for e in lp) for lp in ordered[1:]),
                triangles=tuple(members),
                area=float(w.sum()),
                centroid=centroid,
            )
        )

    edges = _feature_edges(V, faces, loops_by_face, owner, triangle_face)
    return PolyMesh(V, T, tuple(faces), tuple(edges), triangle_face)


def _feature_edges(V, faces, loops_by_face, owner, triangle_face) -> List[Edge]:
    """Group consecutive boundary segments with the same neighbour and direction."""
    edges: List[Edge] = []
    for face in faces:
        for loop in loops_by_face[face.index]:
            segments = [(a, b, int(triangle_face[owner[(b, a)]])) for a, b in loop]
            runs = _collinear_runs(V, segments)
            for start, end, neighbour in runs:
                # record each edge once, from the side of the higher face index
                if face.index < neighbour:
                    continue
                direction = unit(V[end] - V[start])
                n1 = faces[neighbour].normal
                n2 = face.normal
                edges.append(
                    Edge(
                        index=len(edges),
                        face1=neighbour,
                        face2=face.index,
                        start=V[start].copy(),
                        end=V[end].copy(),
                        direction=direction,
                        normal1=n1,
                        normal2=n2,
                        side1=unit(np.cross(direction, n1)),
                        side2=unit(np.cross(n2, direction)),
                    )
                )
    return edges


def _collinear_runs(V, segments) -> List[Tuple[int, int, int]]:
    def same_run(s, t) -> bool:
        if s[2] != t[2]:
            return False
        d1 = unit(V[s[1]] - V[s[0]])
        d2 = unit(V[t[1]] - V[t[0]])
        return np.linalg.norm(np.cross(d1, d2)) <= COLLINEAR_SIN and d1 @ d2 > 0

    count = len(segments)
    # rotate so the loop starts at a run boundary
    first = 0
    for k in range(count):
        if not same_run(segments[k - 1], segments[k]):
            first = k
            break
    else:
        raise InvalidMesh("face boundary has no corners")
    ordered = segments[first:] + segments[:first]
    runs = []
    cur_start, cur_end, cur_nb = ordered[0]
    prev = ordered[0]
    for seg in ordered[1:]:
        if same_run(prev, seg):
            cur_end = seg[1]
        else:
            runs.append((cur_start, cur_end, cur_nb))
            cur_start, cur_end, cur_nb = seg
        prev = seg
    runs.append((cur_start, cur_end, cur_nb))
    return runs


def load_obj(path) -> PolyMesh:
    """Read ``v`` and ``f`` records of a Wavefront file; polygons are fan-triangulated."""
    vertices: List[List[float]] = []
    triangles: List[Tuple[int, int, int]] = []
    text = Path(path).read_text(encoding="utf-8")
    for lineno, raw in enumerate(text.splitlines(), start=1):
        parts = raw.split("#", 1)[0].split()
        if not parts:
            continue
        try:
            if parts[0] == "v":
                vertices.append([float(x) for x in parts[1:4]])
            elif parts[0] == "f":
                idx = []
                for token in parts[1:]:
                    i = int(token.split("/")[0])
                    idx.append(i - 1 if i > 0 else len(vertices) + i)
                for k in range(1, len(idx) - 1):
                    triangles.append((idx[0], idx[k], idx[k + 1]))
        except ValueError as exc:
            raise InvalidMesh(f"{path}:{lineno}: cannot parse {raw.strip()!r}") from exc
    if not vertices or not triangles:
        raise InvalidMesh(f"{path}: no geometry")
    return extract_features(vertices, triangles)


def mesh_mass_properties(mesh: PolyMesh, density: float) -> Tuple[float, np.ndarray, float]:
    """(mass, centre of mass, volume) of a homogeneous solid."""
    tri = mesh.triangle_points()
    vol = np.einsum("ij,ij->i", tri[:, 0], np.cross(tri[:, 1], tri[:, 2])) / 6.0
    volume = float(vol.sum())
    if volume <= 0:
        raise InvalidMesh("mesh encloses no volume")
    com = (tri.sum(axis=1) / 4.0 * vol[:, None]).sum(axis=0) / volume
    return density * volume, com, volume


def transform(mesh: PolyMesh, pose: Pose) -> PolyMesh:
    R, t = pose.rotation, pose.translation
    faces = tuple(
        Face(
            index=f.index,
            normal=R @ f.normal,
            offset=float(f.offset + (R @ f.normal) @ t),
            loop=f.loop,
            holes=f.holes,
            triangles=f.triangles,
            area=f.area,
            centroid=R @ f.centroid + t,
        )
        for f in mesh.faces
    )
    edges = tuple(
        Edge(
            index=e.index,
            face1=e.face1,
            face2=e.face2,
            start=R @ e.start + t,
            end=R @ e.end + t,
            direction=R @ e.direction,
            normal1=R @ e.normal1,
            normal2=R @ e.normal2,
            side1=R @ e.side1,
            side2=R @ e.side2,
        )
        for e in mesh.edges
    )
    return PolyMesh(pose.apply(mesh.vertices), mesh.triangles, faces, edges, mesh.triangle_face)


def oriented_box_volume(points) -> float:
    """Smaller of the world-axis box and the principal-axis box around the points."""
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    axis_box = float(np.prod(P.max(axis=0) - P.min(axis=0)))
    centered = P - P.mean(axis=0)
    _, _, vt = np.linalg.svd(centered, full_matrices=False)
    if vt.shape[0] < 3:
        return axis_box
    local = centered @ vt.T
    pca_box = float(np.prod(local.max(axis=0) - local.min(axis=0)))
    return min(axis_box, pca_box)
