"""Contact interfaces between touching meshes.

Two meshes touch through opposed coplanar faces (a polygon, intersected with
shapely in the common plane) or through a convex edge lying on a face (a
segment clipped against the face polygon). Corners of the resulting polygons
and segment endpoints become point contacts.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence, Tuple, TYPE_CHECKING

import numpy as np
import shapely
from shapely.geometry import LineString, Polygon

from errors import NoContact
from geometry.mesh import Edge, Face, PolyMesh
from statics.contacts import ContactPoint, make_contact

if TYPE_CHECKING:
    from scene.assembly import Assembly

OPPOSED_COS = np.cos(np.radians(1.0))
MIN_AREA = 1e-12
MIN_LENGTH = 1e-9


@dataclass(frozen=True)
class ContactInterface:
    """Touching region between mesh ``a`` (support side) and mesh ``b``.

    ``normal`` points from a into b. ``features`` are ("face", id) or
    ("edge", id) references on a and b.
    """

    kind: str
    normal: np.ndarray
    polygon: np.ndarray
    corners: np.ndarray
    features: Tuple[Tuple[str, int], Tuple[str, int]]
    bodies: Tuple[int, int] = (-1, -1)

    def contacts(self, mu: float) -> List[ContactPoint]:
        return [make_contact(p, self.normal, mu, self.bodies) for p in self.corners]

    def with_bodies(self, supporting: int, supported: int) -> "ContactInterface":
        return ContactInterface(self.kind, self.normal, self.polygon, self.corners, self.features, (supporting, supported))

    def flipped(self) -> "ContactInterface":
        return ContactInterface(
            self.kind,
            -self.normal,
            self.polygon,
            self.corners,
            (self.features[1], self.features[0]),
            (self.bodies[1], self.bodies[0]),
        )


def _boxes_overlap(lo_a, hi_a, lo_b, hi_b, tol: float) -> bool:
    return bool(np.all(lo_a <= hi_b + tol) and np.all(lo_b <= hi_a + tol))


def face_polygon(mesh: PolyMesh, face: Face, u: np.ndarray, v: np.ndarray) -> Polygon:
    def flat(loop):
        pts = mesh.loop_points(loop)
        return np.column_stack([pts @ u, pts @ v])

    return Polygon(flat(face.loop), [flat(h) for h in face.holes])


def _lift(xy: np.ndarray, origin: np.ndarray, u: np.ndarray, v: np.ndarray) -> np.ndarray:
    xy = np.asarray(xy, dtype=float).reshape(-1, 2)
    return origin + xy[:, :1] * u + xy[:, 1:2] * v


def _corners(geom) -> Tuple[np.ndarray, np.ndarray | None, str]:
    """(corner xy, polygon loop xy, kind) of a shapely overlap."""
    polys, lines = [], []
    for part in shapely.get_parts(geom):
        if part.geom_type == "Polygon" and part.area > MIN_AREA:
            polys.append(part.simplify(1e-9))
        elif part.geom_type == "LineString" and part.length > MIN_LENGTH:
            lines.append(part)
    if polys:
        pts, loop = [], None
        for poly in polys:
            ring = np.asarray(poly.exterior.coords)[:-1]
            pts.append(ring)
            for hole in poly.interiors:
                pts.append(np.asarray(hole.coords)[:-1])
            if loop is None:
                loop = ring
        return np.vstack(pts), loop, "polygon"
    if lines:
        merged = shapely.line_merge(shapely.union_all(lines)) if len(lines) > 1 else lines[0]
        ends = []
        for part in shapely.get_parts(merged):
            coords = np.asarray(part.coords)
            ends += [coords[0], coords[-1]]
        return np.array(ends), None, "segment"
    return np.zeros((0, 2)), None, "empty"


def _face_face(mesh_a: PolyMesh, fa: Face, mesh_b: PolyMesh, fb: Face, tol: float) -> ContactInterface | None:
    if fa.normal @ fb.normal > -OPPOSED_COS or abs(fa.offset + fb.offset) > tol:
        return None
    u, v = fa.basis()
    overlap = face_polygon(mesh_a, fa, u, v).intersection(face_polygon(mesh_b, fb, u, v))
    xy, loop, kind = _corners(overlap)
    if kind == "empty":
        return None
    origin = fa.offset * fa.normal
    corners = _lift(xy, origin, u, v)
    polygon = _lift(loop, origin, u, v) if loop is not None else corners
    return ContactInterface("face-face", fa.normal.copy(), polygon, corners, (("face", fa.index), ("face", fb.index)))


def edge_in_normal_cone(edge: Edge, w: np.ndarray, tol: float = 1e-9) -> bool:
    """True if w lies strictly between the two face normals of a convex edge."""
    if not edge.convex:
        return False
    if edge.normal1 @ w >= OPPOSED_COS or edge.normal2 @ w >= OPPOSED_COS:
        return False
    return bool(w @ edge.side1 <= tol and w @ edge.side2 <= tol)


def _edge_face(edge: Edge, mesh_f: PolyMesh, face: Face, tol: float) -> np.ndarray | None:
    """Clipped segment of ``edge`` resting on ``face``; the edge's body lies above the face."""
    if abs(face.normal @ edge.start - face.offset) > tol or abs(face.normal @ edge.end - face.offset) > tol:
        return None
    if not edge_in_normal_cone(edge, -face.normal):
        return None
    u, v = face.basis()
    seg = LineString([(edge.start @ u, edge.start @ v), (edge.end @ u, edge.end @ v)])
    xy, _, kind = _corners(face_polygon(mesh_f, face, u, v).intersection(seg))
    if kind != "segment":
        return None
    corners = _lift(xy, face.offset * face.normal, u, v)
    return corners


def interfaces_between(mesh_a: PolyMesh, mesh_b: PolyMesh, tol: float) -> List[ContactInterface]:
    """All interfaces between world-frame meshes; normals point from a into b."""
    lo_a, hi_a = mesh_a.bounds
    lo_b, hi_b = mesh_b.bounds
    if not _boxes_overlap(lo_a, hi_a, lo_b, hi_b, tol):
        return []
    out: List[ContactInterface] = []
    for fa in mesh_a.faces:
        for fb in mesh_b.faces:
            found = _face_face(mesh_a, fa, mesh_b, fb, tol)
            if found is not None:
                out.append(found)
    for edge in mesh_b.edges:
        for fa in mesh_a.faces:
            hit = _edge_face(edge, mesh_a, fa, tol)
            if hit is not None:
                out.append(ContactInterface("face-edge", fa.normal.copy(), hit, hit, (("face", fa.index), ("edge", edge.index))))
    for edge in mesh_a.edges:
        for fb in mesh_b.faces:
            hit = _edge_face(edge, mesh_b, fb, tol)
            if hit is not None:
                out.append(ContactInterface("edge-face", -fb.normal, hit, hit, (("edge", edge.index), ("face", fb.index))))
    return out


def resolve_contacts(mesh: PolyMesh, assembly: "Assembly", contact_tol: float) -> List[ContactInterface]:
    """Interfaces between a posed new object and every assembly object.

    The new object gets id ``len(assembly.placed)``; interface normals point
    from the assembly object into it.
    """
    new_id = len(assembly.placed)
    found: List[ContactInterface] = []
    for obj_id, placed in enumerate(assembly.placed):
        for iface in interfaces_between(placed.world, mesh, contact_tol):
            found.append(iface.with_bodies(obj_id, new_id))
    if not found:
        raise NoContact("object touches nothing")
    return found


def interface_contacts(interfaces: Sequence[ContactInterface], mu_of) -> List[ContactPoint]:
    """Corner contacts with the pairwise friction coefficient ``mu_of(a, b)``."""
    out: List[ContactPoint] = []
    for iface in interfaces:
        out += iface.contacts(mu_of(*iface.bodies))
    return out
