"""Candidate pose checks, cheapest first.

penetration -> contact resolution -> QR tension screen -> QP -> equilibrium.
A failing stage stops the pipeline; no QP is solved for a candidate the QR
screen rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List, Tuple

from config import PlannerConfig
from errors import Infeasible, NoContact, NoEquilibrium
from geometry.mesh import transform
from geometry.primitives import Pose
from planner.collision import detect_collisions
from planner.interfaces import ContactInterface, interface_contacts, resolve_contacts
from scene.assembly import Assembly, PolyObject
from statics.contacts import ContactPoint
from statics.equilibrium import (
    ForceSolution,
    build_equilibrium_system,
    check_equilibrium,
    max_tension,
    solve_reaction_forces_qr,
)
from statics.qp import solve_reaction_forces_qp
from utils.timing import lap

PENETRATION = "Penetration"
NO_CONTACT = "NoContact"
TENSION_SCREEN = "TensionScreen"
QP_INFEASIBLE = "QPInfeasible"
NOT_EQUILIBRATED = "NotEquilibrated"
REJECTION_STAGES = (PENETRATION, NO_CONTACT, TENSION_SCREEN, QP_INFEASIBLE, NOT_EQUILIBRATED)


@dataclass(frozen=True)
class Rejected:
    stage: str
    detail: str = ""


@dataclass(frozen=True)
class Accepted:
    pose: Pose
    interfaces: Tuple[ContactInterface, ...]
    contacts: Tuple[ContactPoint, ...]
    forces: ForceSolution
    assembly: Assembly


def validate_pose(
    obj: PolyObject,
    pose: Pose,
    assembly: Assembly,
    config: PlannerConfig,
    timings: Dict[str, float] | None = None,
) -> Accepted | Rejected:
    """Run the check pipeline; ``timings`` (ms per stage) is accumulated in place."""
    sink = timings if timings is not None else {}
    tol = config.tolerances
    world = transform(obj.mesh, pose)

    with lap(sink, "collision"):
        if detect_collisions(world, assembly, tol.penetration):
            return Rejected(PENETRATION)

    with lap(sink, "contacts"):
        try:
            interfaces = resolve_contacts(world, assembly, tol.contact)
        except NoContact as exc:
            return Rejected(NO_CONTACT, str(exc))
        contacts: List[ContactPoint] = interface_contacts(
            interfaces, lambda a, _b: min(assembly.placed[a].obj.mu, obj.mu)
        )
        updated = assembly.with_object(obj, pose, interfaces, contacts)

    with lap(sink, "qr"):
        try:
            system = build_equilibrium_system(updated, updated.contacts, updated.gravity)
            screen = solve_reaction_forces_qr(system)
        except NoEquilibrium as exc:
            return Rejected(TENSION_SCREEN, str(exc))
        if max_tension(screen) > config.tension_threshold:
            return Rejected(TENSION_SCREEN, f"tension {max_tension(screen):.3g} N")

    with lap(sink, "qp"):
        try:
            forces = solve_reaction_forces_qp(system)
        except Infeasible as exc:
            return Rejected(QP_INFEASIBLE, str(exc))

    if not check_equilibrium(forces, tol.equilibrium):
        return Rejected(NOT_EQUILIBRATED, f"residual {forces.residual:.3g}")
    return Accepted(pose, tuple(interfaces), tuple(contacts), forces, updated)
