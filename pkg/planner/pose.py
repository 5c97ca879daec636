"""Closed-form object pose from two matched point pairs.

The scene frame (u_w, (a-b)/|a-b|, w_w) and the object frame
(u_o, (q-r)/|q-r|, w_o) are built the same way; the rotation maps one onto
the other and the translation puts q on a.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from errors import DegeneratePose
from geometry.mesh import PolyMesh
from geometry.primitives import Pose
from planner.matching import FeaturePair, SceneContactSample, feature_normal

DEGENERATE = 1e-12


@dataclass(frozen=True)
class PlacementCandidate:
    pose: Pose
    a: SceneContactSample
    b: SceneContactSample
    q: np.ndarray
    r: np.ndarray
    kind: str


def _unit_or_fail(v: np.ndarray, what: str) -> np.ndarray:
    n = float(np.linalg.norm(v))
    if n <= DEGENERATE:
        raise DegeneratePose(f"{what} is degenerate")
    return v / n


def determine_pose(a, b, n_a, q, r, n_obj) -> Pose:
    a, b, q, r = (np.asarray(x, dtype=float) for x in (a, b, q, r))
    d_w = _unit_or_fail(a - b, "scene point pair")
    d_o = _unit_or_fail(q - r, "object point pair")
    u_w = _unit_or_fail(np.cross(d_w, np.asarray(n_a, dtype=float)), "scene normal along the point pair")
    u_o = -_unit_or_fail(np.cross(d_o, np.asarray(n_obj, dtype=float)), "object normal along the point pair")
    w_w = np.cross(u_w, d_w)
    w_o = np.cross(u_o, d_o)
    C_s = np.vstack([u_w, d_w, w_w])
    C_o = np.vstack([u_o, d_o, w_o])
    R = C_s.T @ C_o
    return Pose(R, a - R @ q)


def candidate_poses(mesh: PolyMesh, a: SceneContactSample, b: SceneContactSample, pair: FeaturePair) -> List[PlacementCandidate]:
    """Poses anchored on (a, feature 1) and on (b, feature 2); duplicates dropped."""
    out: List[PlacementCandidate] = []
    anchors = (
        (a, b, pair.q, pair.r, pair.normal1),
        (b, a, pair.r, pair.q, feature_normal(mesh, pair.feature2)),
    )
    for first, second, p1, p2, normal in anchors:
        try:
            pose = determine_pose(first.position, second.position, first.normal, p1, p2, normal)
        except DegeneratePose:
            continue
        if any(
            np.allclose(pose.rotation, c.pose.rotation, atol=1e-9) and np.allclose(pose.translation, c.pose.translation, atol=1e-9)
            for c in out
        ):
            continue
        out.append(PlacementCandidate(pose, a, b, pair.q, pair.r, pair.kind))
    return out
