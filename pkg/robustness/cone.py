"""Slipping robustness from the friction cone.

A push of magnitude s along e moves the contact reaction from r to r + s e.
The largest s keeping r + s e inside the cone ||(r_u, r_v)|| <= mu r_n is the
smaller root of a quadratic in s.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np

from statics.contacts import ContactPoint
from statics.equilibrium import ForceSolution

INF = math.inf


def cone_line_robustness(r_local, e_local, mu: float) -> float:
    r_u, r_v, r_n = (float(x) for x in r_local)
    e_u, e_v, e_n = (float(x) for x in e_local)
    mu2 = mu * mu
    a = mu2 * e_n * e_n - e_u * e_u - e_v * e_v
    b = 2.0 * (mu2 * r_n * e_n - r_u * e_u - r_v * e_v)
    c = mu2 * r_n * r_n - r_u * r_u - r_v * r_v
    if c < 0.0:
        return 0.0
    if a == 0.0:
        if b == 0.0:
            return INF
        s = -c / b
    else:
        disc = b * b - 4.0 * a * c
        if disc < 0.0:
            return 0.0
        s = (-b - math.sqrt(disc)) / (2.0 * a)
    # on the cone boundary with the push leading outward the root is exactly 0
    if s < 0.0:
        return INF
    return 0.0 if s == 0.0 else s


def contact_push(contact: ContactPoint, body: int, e_hat) -> np.ndarray:
    """Push direction seen by ``contact`` when it acts on ``body``, in the contact frame.

    The contact normal is flipped for the supporting body so it always points
    into ``body``; the load transferred onto the contact is -e.
    """
    local = -contact.to_local(e_hat)
    if contact.bodies[1] != body:
        local = np.array([-local[0], local[1], -local[2]])
    return local


def reaction_local(contact: ContactPoint, body: int, local_force) -> np.ndarray:
    r = np.asarray(local_force, dtype=float)
    if contact.bodies[1] != body:
        # mirror the frame (u, v, n) -> (-u, v, -n), still right-handed, and
        # take the reaction acting on the supporting body
        r = np.array([r[0], -r[1], r[2]])
    return r


def slipping_robustness(
    contacts: Sequence[ContactPoint], forces: ForceSolution, e_hat, body: int | None = None
) -> float:
    """Sum of per-contact cone limits; any unbounded term makes the sum unbounded."""
    total = 0.0
    for i, c in enumerate(contacts):
        owner = c.bodies[1] if body is None else body
        if not c.touches(owner):
            continue
        s = cone_line_robustness(reaction_local(c, owner, forces.local[i]), contact_push(c, owner, e_hat), c.mu)
        if s == INF:
            return INF
        total += s
    return total


def cone_line_robustness_batch(r_local, e_local, mu: float) -> np.ndarray:
    """Vectorised :func:`cone_line_robustness` for one reaction and K push directions."""
    r_u, r_v, r_n = (float(x) for x in r_local)
    E = np.asarray(e_local, dtype=float).reshape(-1, 3)
    e_u, e_v, e_n = E[:, 0], E[:, 1], E[:, 2]
    mu2 = mu * mu
    c = mu2 * r_n * r_n - r_u * r_u - r_v * r_v
    if c < 0.0:
        return np.zeros(len(E))
    a = mu2 * e_n * e_n - e_u * e_u - e_v * e_v
    b = 2.0 * (mu2 * r_n * e_n - r_u * e_u - r_v * e_v)
    disc = b * b - 4.0 * a * c
    with np.errstate(divide="ignore", invalid="ignore"):
        quad = (-b - np.sqrt(np.maximum(disc, 0.0))) / (2.0 * a)
        lin = np.where(b != 0.0, -c / b, -INF)
    s = np.where(a == 0.0, lin, quad)
    out = np.where(s < 0.0, INF, np.abs(s))
    out = np.where((a != 0.0) & (disc < 0.0), 0.0, out)
    return out


def slipping_robustness_batch(
    contacts: Sequence[ContactPoint], forces: ForceSolution, pushes, body: int
) -> np.ndarray:
    """Slipping robustness of ``body`` for K world push directions."""
    E = np.asarray(pushes, dtype=float).reshape(-1, 3)
    total = np.zeros(len(E))
    for i, c in enumerate(contacts):
        if not c.touches(body):
            continue
        local = -(E @ c.frame)
        if c.bodies[1] != body:
            local = local * np.array([-1.0, 1.0, -1.0])
        total += cone_line_robustness_batch(reaction_local(c, body, forces.local[i]), local, c.mu)
    return total
