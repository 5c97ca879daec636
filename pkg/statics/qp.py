"""Friction-constrained reaction forces.

    minimize    1/2 f^T f
    subject to  A f = b
                -n.f <= 0                      (no tension)
                +-u.f +- v.f - mu n.f <= 0     (4-facet friction pyramid)

A phase-1 LP (HiGHS through ``scipy.optimize.linprog``) proves feasibility
and gives a starting point; a primal active-set loop then walks to the
minimum-norm optimum.
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

from errors import Infeasible
from statics.equilibrium import EquilibriumSystem, ForceSolution, force_solution, independent_rows
from utils.logger import log_debug

KKT_TOL = 1e-8
_SIGNS = ((1.0, 1.0), (1.0, -1.0), (-1.0, 1.0), (-1.0, -1.0))


def friction_constraints(system: EquilibriumSystem) -> np.ndarray:
    """G with G f <= 0 encoding non-tension and the friction pyramid."""
    n = 3 * system.n_contacts
    rows = []
    for i, c in enumerate(system.contacts):
        cols = slice(3 * i, 3 * i + 3)
        row = np.zeros(n)
        row[cols] = -c.normal
        rows.append(row)
        for su, sv in _SIGNS:
            row = np.zeros(n)
            row[cols] = su * c.tangent_u + sv * c.tangent_v - c.mu * c.normal
            rows.append(row)
    return np.array(rows).reshape(-1, n)


def _phase_one(A: np.ndarray, b: np.ndarray, G: np.ndarray) -> np.ndarray:
    n = G.shape[1]
    res = linprog(
        c=np.zeros(n),
        A_ub=G,
        b_ub=np.zeros(G.shape[0]),
        A_eq=A if A.size else None,
        b_eq=b if A.size else None,
        bounds=[(None, None)] * n,
        method="highs",
        options={"primal_feasibility_tolerance": 1e-10},
    )
    if res.status == 2:
        raise Infeasible("no force distribution satisfies the friction constraints")
    if res.status != 0 or res.x is None:
        raise Infeasible(f"feasibility LP failed: {res.message}")
    return np.asarray(res.x, dtype=float)


def _active_set(A: np.ndarray, b: np.ndarray, G: np.ndarray, x: np.ndarray, max_iter: int) -> np.ndarray:
    working: list[int] = []
    m = A.shape[0]
    for it in range(max_iter):
        M = np.vstack([A, G[working]]) if working else A
        rhs = np.concatenate([b, np.zeros(len(working))])
        if M.shape[0]:
            target, *_ = np.linalg.lstsq(M, rhs, rcond=None)
        else:
            target = np.zeros_like(x)
        step = target - x
        tol = KKT_TOL * max(1.0, float(np.linalg.norm(x)))
        if np.linalg.norm(step) <= tol:
            if not working:
                return target
            # x + M^T y = 0 at the equality-constrained optimum
            y, *_ = np.linalg.lstsq(M.T, -target, rcond=None)
            mult = y[m:]
            worst = int(np.argmin(mult))
            if mult[worst] >= -tol:
                return target
            working.pop(worst)
            x = target
            continue
        alpha, blocking = 1.0, None
        Gs = G @ step
        Gx = G @ x
        for i in np.argsort(-Gs):
            if Gs[i] <= 1e-14 * np.linalg.norm(step):
                break
            if i in working:
                continue
            a = max(0.0, -Gx[i] / Gs[i])
            if a < alpha:
                alpha, blocking = a, int(i)
        x = x + alpha * step
        if blocking is not None:
            working.append(blocking)
    log_debug("[qp] active set hit the iteration cap", iterations=max_iter, working=len(working))
    return x


def solve_reaction_forces_qp(system: EquilibriumSystem) -> ForceSolution:
    n = 3 * system.n_contacts
    if n == 0:
        if system.A.shape[0] and np.linalg.norm(system.b) > 0:
            raise Infeasible("no contacts to balance gravity")
        return force_solution(system, np.zeros(0))
    keep = independent_rows(system.A)
    A = system.A[keep]
    b = system.b[keep]
    G = friction_constraints(system)
    x0 = _phase_one(A, b, G)
    x = _active_set(A, b, G, x0, max_iter=20 * G.shape[0] + 50)
    sol = force_solution(system, x)
    log_debug("[qp] solved", contacts=system.n_contacts, residual=sol.residual, objective=0.5 * float(x @ x))
    return sol
