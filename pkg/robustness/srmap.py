"""Static robustness of an assembly and its surface map.

Every object gets the reaction forces of one shared minimum-norm solve. A push
on object X is checked against X's own slipping and toppling limits only; the
robustness at a surface point is the smaller of the two.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Dict, List

import numpy as np
import shapely
from scipy.stats import qmc

from errors import NoEquilibrium, NotInEquilibrium, Unsupported
from geometry.mesh import Face, PolyMesh
from planner.interfaces import OPPOSED_COS, face_polygon
from robustness.cone import INF, slipping_robustness_batch
from robustness.toppling import ToppleModel, prepare_toppling, toppling_robustness_batch
from scene.assembly import Assembly
from statics.equilibrium import ForceSolution, build_equilibrium_system, solve_reaction_forces_qr
from utils.logger import log_debug

OCCLUSION_TOL = 1e-4


@dataclass(frozen=True)
class SRMap:
    positions: np.ndarray
    normals: np.ndarray
    owners: np.ndarray
    faces: np.ndarray
    values: np.ndarray
    fixed: np.ndarray
    density: float

    def __len__(self) -> int:
        return len(self.values)

    @property
    def finite(self) -> np.ndarray:
        return np.isfinite(self.values)

    def subset(self, mask) -> "SRMap":
        m = np.asarray(mask, dtype=bool)
        return SRMap(
            self.positions[m], self.normals[m], self.owners[m], self.faces[m], self.values[m], self.fixed[m], self.density
        )


def assembly_forces(assembly: Assembly) -> ForceSolution:
    """Shared minimum-norm reaction forces; raises NotInEquilibrium."""
    try:
        system = build_equilibrium_system(assembly, assembly.contacts, assembly.gravity)
        return solve_reaction_forces_qr(system)
    except (NoEquilibrium, Unsupported) as exc:
        raise NotInEquilibrium(str(exc)) from exc


@dataclass(frozen=True)
class _ObjectModel:
    body: int
    contacts: tuple
    forces: ForceSolution
    topple: ToppleModel


def _object_model(assembly: Assembly, body: int, forces: ForceSolution) -> _ObjectModel:
    idx = assembly.contact_indices(body)
    contacts = tuple(assembly.contacts[k] for k in idx)
    sub = forces.subset(idx)
    placed = assembly.placed[body]
    topple = prepare_toppling(contacts, sub, placed.obj.mass, placed.com_world, assembly.gravity, body)
    return _ObjectModel(body, contacts, sub, topple)


def _evaluate(model: _ObjectModel, points: np.ndarray, pushes: np.ndarray) -> np.ndarray:
    if not model.contacts:
        return np.zeros(len(points))
    slip = slipping_robustness_batch(model.contacts, model.forces, pushes, model.body)
    top = toppling_robustness_batch(model.topple, points, pushes)
    return np.minimum(slip, top)


def static_robustness_batch(
    assembly: Assembly, body: int, points, pushes, forces: ForceSolution | None = None
) -> np.ndarray:
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    E = np.asarray(pushes, dtype=float).reshape(-1, 3)
    if assembly.placed[body].fixed:
        return np.full(len(P), INF)
    if not assembly.contact_indices(body):
        return np.zeros(len(P))
    if forces is None:
        forces = assembly_forces(assembly)
    return _evaluate(_object_model(assembly, body, forces), P, E)


def static_robustness(assembly: Assembly, body: int, point, e_hat, forces: ForceSolution | None = None) -> float:
    """min(slipping, toppling) robustness of ``body`` pushed along ``e_hat`` at ``point``."""
    e = np.asarray(e_hat, dtype=float)
    e = e / np.linalg.norm(e)
    return float(static_robustness_batch(assembly, body, [point], [e], forces)[0])


def _face_samples(mesh: PolyMesh, face: Face, density: float) -> np.ndarray:
    """Deterministic stratified points on a face, about ``area * density`` of them.

    A Halton sequence (first point skipped) takes the place of a jittered
    grid; it has no random state, so the same scene gives the same map.
    Coordinate 0 picks a triangle by area, coordinates 1-2 a barycentric point.
    """
    count = max(1, int(round(face.area * density)))
    tris = mesh.vertices[mesh.triangles[list(face.triangles)]]
    areas = 0.5 * np.linalg.norm(np.cross(tris[:, 1] - tris[:, 0], tris[:, 2] - tris[:, 0]), axis=1)
    cdf = np.cumsum(areas) / areas.sum()
    seq = qmc.Halton(d=3, scramble=False).random(count + 1)[1:]
    which = np.minimum(np.searchsorted(cdf, seq[:, 0], side="right"), len(tris) - 1)
    s, t = seq[:, 1], seq[:, 2]
    flip = s + t > 1.0
    s = np.where(flip, 1.0 - s, s)
    t = np.where(flip, 1.0 - t, t)
    a, b, c = tris[which, 0], tris[which, 1], tris[which, 2]
    return a + s[:, None] * (b - a) + t[:, None] * (c - a)


def _covered(assembly: Assembly, body: int, face: Face, points: np.ndarray) -> np.ndarray:
    """Mask of points hidden by an opposed coplanar face of another object."""
    mask = np.zeros(len(points), dtype=bool)
    u, v = face.basis()
    x, y = points @ u, points @ v
    for other_id, other in enumerate(assembly.placed):
        if other_id == body:
            continue
        for g in other.world.faces:
            if g.normal @ face.normal > -OPPOSED_COS or abs(g.offset + face.offset) > OCCLUSION_TOL:
                continue
            poly = face_polygon(other.world, g, u, v)
            mask |= shapely.intersects_xy(poly, x, y)
    return mask


def compute_sr_map(assembly: Assembly, density: float = 200.0, forces: ForceSolution | None = None) -> SRMap:
    """Sample every exposed face and evaluate robustness to a push against the surface."""
    if density <= 0:
        raise ValueError("density must be positive")
    if forces is None and assembly.non_fixed_ids():
        forces = assembly_forces(assembly)
    positions: List[np.ndarray] = []
    normals: List[np.ndarray] = []
    owners: List[np.ndarray] = []
    faces: List[np.ndarray] = []
    values: List[np.ndarray] = []
    for body, placed in enumerate(assembly.placed):
        model = None if placed.fixed else _object_model(assembly, body, forces)
        for face in placed.world.faces:
            pts = _face_samples(placed.world, face, density)
            pts = pts[~_covered(assembly, body, face, pts)]
            if not len(pts):
                continue
            pushes = np.broadcast_to(-face.normal, pts.shape)
            if model is None:
                r = np.full(len(pts), INF)
            else:
                r = _evaluate(model, pts, pushes)
            positions.append(pts)
            normals.append(np.broadcast_to(face.normal, pts.shape).copy())
            owners.append(np.full(len(pts), body))
            faces.append(np.full(len(pts), face.index))
            values.append(r)
    if not positions:
        empty = np.zeros((0, 3))
        return SRMap(empty, empty, np.zeros(0, int), np.zeros(0, int), np.zeros(0), np.zeros(0, bool), density)
    owners_arr = np.concatenate(owners)
    fixed = np.array([assembly.placed[o].fixed for o in owners_arr], dtype=bool)
    srmap = SRMap(
        np.vstack(positions),
        np.vstack(normals),
        owners_arr,
        np.concatenate(faces),
        np.concatenate(values),
        fixed,
        density,
    )
    log_debug("[srmap] map ready", samples=len(srmap), finite=int(srmap.finite.sum()), density=float(density))
    return srmap


def robustness_summary(srmap: SRMap) -> Dict[str, float]:
    finite = srmap.values[srmap.finite]
    if finite.size == 0:
        return {"min": math.inf, "median": math.inf, "max": math.inf, "infinite": int(len(srmap)), "samples": len(srmap)}
    return {
        "min": float(finite.min()),
        "median": float(np.median(finite)),
        "max": float(finite.max()),
        "infinite": int(len(srmap) - finite.size),
        "samples": len(srmap),
    }
