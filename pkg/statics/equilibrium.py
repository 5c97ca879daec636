"""Static equilibrium of an assembly: A f = b over stacked contact forces.

Rows exist only for non-fixed objects (6 per object: force then torque about
the world origin). Column block i holds the world-frame force of contact i,
entering the supported body with + and the supporting body with -.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Sequence, TYPE_CHECKING

import numpy as np
from scipy.linalg import qr, solve_triangular

from errors import NoEquilibrium, Unsupported
from geometry.primitives import skew
from statics.contacts import ContactPoint

if TYPE_CHECKING:
    from scene.assembly import Assembly

RANK_TOL = 1e-9
CONSISTENCY_TOL = 1e-6


@dataclass(frozen=True)
class EquilibriumSystem:
    A: np.ndarray
    b: np.ndarray
    contacts: tuple
    object_rows: Dict[int, int]
    total_weight: float

    @property
    def n_contacts(self) -> int:
        return len(self.contacts)


@dataclass(frozen=True)
class ForceSolution:
    forces: np.ndarray
    local: np.ndarray
    residual: float
    max_tension: float
    friction_violation: float

    def force_on(self, index: int, body: int, contacts: Sequence[ContactPoint]) -> np.ndarray:
        """Force of contact ``index`` acting on ``body``."""
        f = self.forces[index]
        return f if contacts[index].bodies[1] == body else -f

    def subset(self, indices: Sequence[int]) -> "ForceSolution":
        idx = list(indices)
        return ForceSolution(
            self.forces[idx].reshape(-1, 3),
            self.local[idx].reshape(-1, 3),
            self.residual,
            self.max_tension,
            self.friction_violation,
        )


def build_equilibrium_system(assembly: "Assembly", contacts: Sequence[ContactPoint], gravity) -> EquilibriumSystem:
    g = np.asarray(gravity, dtype=float)
    movable = assembly.non_fixed_ids()
    rows = {obj_id: 6 * k for k, obj_id in enumerate(movable)}
    touched = {body for c in contacts for body in c.bodies}
    for obj_id in movable:
        if obj_id not in touched:
            raise Unsupported(f"object {assembly.placed[obj_id].obj.name!r} has no contact")

    A = np.zeros((6 * len(movable), 3 * len(contacts)))
    b = np.zeros(6 * len(movable))
    for i, c in enumerate(contacts):
        block = np.vstack([np.eye(3), skew(c.position)])
        supporting, supported = c.bodies
        if supported in rows:
            A[rows[supported]:rows[supported] + 6, 3 * i:3 * i + 3] += block
        if supporting in rows:
            A[rows[supporting]:rows[supporting] + 6, 3 * i:3 * i + 3] -= block

    weight = 0.0
    for obj_id, r in rows.items():
        placed = assembly.placed[obj_id]
        m = placed.obj.mass
        b[r:r + 6] = -m * np.concatenate([g, skew(placed.com_world) @ g])
        weight += m * float(np.linalg.norm(g))
    return EquilibriumSystem(A, b, tuple(contacts), rows, weight)


def independent_rows(A: np.ndarray) -> np.ndarray:
    """Indices of a maximal set of linearly independent rows, in pivot order."""
    if A.size == 0:
        return np.arange(0)
    _, R, piv = qr(A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    if diag.size == 0 or diag[0] == 0.0:
        return np.arange(0)
    rank = int(np.sum(diag > RANK_TOL * diag[0]))
    return np.sort(piv[:rank])


def force_solution(system: EquilibriumSystem, f) -> ForceSolution:
    f = np.asarray(f, dtype=float).reshape(-1)
    forces = f.reshape(-1, 3)
    local = np.array([c.to_local(force) for c, force in zip(system.contacts, forces)]).reshape(-1, 3)
    residual = float(np.linalg.norm(system.A @ f - system.b)) if system.A.size else float(np.linalg.norm(system.b))
    if len(local):
        tension = float(np.max(np.maximum(0.0, -local[:, 2])))
        mu = np.array([c.mu for c in system.contacts])
        violation = float(np.max(np.maximum(0.0, np.abs(local[:, 0]) + np.abs(local[:, 1]) - mu * local[:, 2])))
    else:
        tension = violation = 0.0
    return ForceSolution(forces, local, residual, tension, violation)


def solve_reaction_forces_qr(system: EquilibriumSystem) -> ForceSolution:
    """Minimal two-norm f with A f = b via pivoted QR of A^T."""
    n = 3 * system.n_contacts
    if system.A.shape[0] == 0:
        return force_solution(system, np.zeros(n))
    Q, R, piv = qr(system.A.T, mode="economic", pivoting=True)
    diag = np.abs(np.diag(R))
    rank = int(np.sum(diag > RANK_TOL * diag[0])) if diag.size and diag[0] > 0 else 0
    if rank == 0:
        f = np.zeros(n)
    else:
        # A[piv[:k]] = R11^T Q1^T on the independent equations
        z = solve_triangular(R[:rank, :rank], system.b[piv[:rank]], trans="T", lower=False)
        f = Q[:, :rank] @ z
    sol = force_solution(system, f)
    if sol.residual > CONSISTENCY_TOL * max(system.total_weight, 1.0):
        raise NoEquilibrium(f"gravity wrench not reachable by contacts (residual {sol.residual:.3g})")
    return sol


def max_tension(sol: ForceSolution) -> float:
    return sol.max_tension


def check_equilibrium(sol: ForceSolution, tol: float) -> bool:
    return sol.residual <= tol and sol.max_tension <= tol and sol.friction_violation <= tol


def contacts_of(contacts: Sequence[ContactPoint], body: int) -> List[int]:
    return [i for i, c in enumerate(contacts) if c.touches(body)]
