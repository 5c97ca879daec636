"""Toppling robustness about convex-hull edges of an object's contact points.

An object topples about a hull edge k_s -> k_t. For a rotation axis
a = k_t - k_s, the edge is a valid pivot when gravity holds the object
against the rotation, (p_c - k_s) x m g . a < 0, and every contact off the
axis line is being pressed by the rotation, (p_i - k_s) x f_n,i . a > 0.
A push e at p topples the object once its moment about the axis overcomes
gravity's.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from errors import DegenerateHull, NoAxes
from geometry.hull import quickhull
from robustness.cone import INF
from statics.contacts import ContactPoint
from statics.equilibrium import ForceSolution

SIGN_TOL = 1e-12
ON_AXIS_TOL = 1e-9


@dataclass(frozen=True)
class TopplingAxis:
    start: np.ndarray
    end: np.ndarray

    @property
    def vector(self) -> np.ndarray:
        return self.end - self.start

    def reversed(self) -> "TopplingAxis":
        return TopplingAxis(self.end, self.start)


@dataclass(frozen=True)
class ToppleModel:
    """Push-independent part of the toppling test for one object.

    ``kind`` is "hull" (valid axes below), "line" (collinear support along
    ``line_direction``), "point" or "none" (no contact at all).
    """

    kind: str
    starts: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    vectors: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))
    restoring: np.ndarray = field(default_factory=lambda: np.zeros(0))
    anchor: np.ndarray | None = None
    line_direction: np.ndarray | None = None


def toppling_axes(contacts: Sequence[ContactPoint]) -> List[TopplingAxis]:
    """Both orientations of every hull edge of the contact positions."""
    if len(contacts) < 3:
        raise NoAxes(f"{len(contacts)} contact(s) cannot span a support polygon")
    points = np.array([c.position for c in contacts])
    try:
        hull = quickhull(points)
    except DegenerateHull as exc:
        raise NoAxes(str(exc)) from exc
    axes: List[TopplingAxis] = []
    for i, j in hull.edges:
        axis = TopplingAxis(points[i].copy(), points[j].copy())
        axes += [axis, axis.reversed()]
    return axes


def _normal_forces(contacts: Sequence[ContactPoint], forces: ForceSolution, body: int) -> np.ndarray:
    """World-frame normal components of the reactions acting on ``body``."""
    out = []
    for i, c in enumerate(contacts):
        n = c.normal if c.bodies[1] == body else -c.normal
        out.append(forces.local[i, 2] * n)
    return np.array(out).reshape(-1, 3)


def validate_axis(
    axis: TopplingAxis,
    contacts: Sequence[ContactPoint],
    forces: ForceSolution,
    mass: float,
    com,
    g,
    body: int | None = None,
) -> bool:
    a = axis.vector
    a_len = np.linalg.norm(a)
    if a_len == 0.0:
        return False
    gravity_term = float(np.cross(np.asarray(com) - axis.start, mass * np.asarray(g, dtype=float)) @ a)
    if gravity_term >= -SIGN_TOL:
        return False
    owner = contacts[0].bodies[1] if body is None else body
    normals = _normal_forces(contacts, forces, owner)
    for c, fn in zip(contacts, normals):
        arm = c.position - axis.start
        if np.linalg.norm(np.cross(arm, a / a_len)) <= ON_AXIS_TOL:
            continue
        if float(np.cross(arm, fn) @ a) <= SIGN_TOL:
            return False
    return True


def prepare_toppling(
    contacts: Sequence[ContactPoint],
    forces: ForceSolution,
    mass: float,
    com,
    g=(0.0, 0.0, -9.81),
    body: int | None = None,
) -> ToppleModel:
    if not contacts:
        return ToppleModel("none")
    com = np.asarray(com, dtype=float)
    try:
        axes = toppling_axes(contacts)
    except NoAxes:
        points = np.array([c.position for c in contacts])
        spread = points - points.mean(axis=0)
        if np.linalg.norm(spread) <= ON_AXIS_TOL:
            return ToppleModel("point", anchor=points[0])
        _, _, vt = np.linalg.svd(spread, full_matrices=False)
        return ToppleModel("line", anchor=points[0], line_direction=vt[0])
    weight = mass * np.asarray(g, dtype=float)
    valid = [ax for ax in axes if validate_axis(ax, contacts, forces, mass, com, g, body)]
    if not valid:
        return ToppleModel("hull")
    starts = np.array([ax.start for ax in valid])
    vectors = np.array([ax.vector for ax in valid])
    restoring = -np.einsum("ij,ij->i", np.cross(com - starts, weight), vectors)
    return ToppleModel("hull", starts, vectors, restoring)


def toppling_robustness_batch(model: ToppleModel, points, pushes) -> np.ndarray:
    """Toppling robustness for K pushes (points (K,3), unit directions (K,3))."""
    P = np.asarray(points, dtype=float).reshape(-1, 3)
    E = np.asarray(pushes, dtype=float).reshape(-1, 3)
    out = np.full(len(P), INF)
    if model.kind == "none":
        out[:] = 0.0
    elif model.kind == "point":
        arms = P - model.anchor
        moment = np.linalg.norm(np.cross(arms, E), axis=1)
        out[moment > ON_AXIS_TOL * np.maximum(1.0, np.linalg.norm(arms, axis=1))] = 0.0
    elif model.kind == "line":
        arms = P - model.anchor
        moment = np.cross(arms, E) @ model.line_direction
        out[np.abs(moment) > ON_AXIS_TOL * np.maximum(1.0, np.linalg.norm(arms, axis=1))] = 0.0
    elif len(model.vectors):
        # denom[k, a] = ((p_k - k_s,a) x e_k) . a
        arms = P[:, None, :] - model.starts[None, :, :]
        denom = np.einsum("kaj,aj->ka", np.cross(arms, E[:, None, :]), model.vectors)
        # moments within rounding of zero (push through the axis) cannot topple
        scale = np.linalg.norm(arms, axis=2) * np.linalg.norm(model.vectors, axis=1)[None, :]
        with np.errstate(divide="ignore", invalid="ignore"):
            ratio = np.where(denom > ON_AXIS_TOL * scale, model.restoring[None, :] / denom, INF)
        ratio = np.where(ratio > 0.0, ratio, INF)
        out = ratio.min(axis=1)
    return out


def toppling_robustness(
    contacts: Sequence[ContactPoint],
    forces: ForceSolution,
    mass: float,
    com,
    e_hat,
    point,
    g=(0.0, 0.0, -9.81),
    body: int | None = None,
) -> float:
    """Smallest push along ``e_hat`` at ``point`` that topples the object about a valid axis."""
    model = prepare_toppling(contacts, forces, mass, com, g, body)
    return float(toppling_robustness_batch(model, [point], [e_hat])[0])
