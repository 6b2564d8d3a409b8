"""Dense two-phase primal simplex for small linear programs.

Solves  min c.x  subject to  A x <= b,  x >= 0  with Bland's rule for both
entering and leaving variables, which guarantees termination.  Problem
sizes here are tiny (one column per hypergraph vertex, one row per error
plus one per upper bound), so a dense numpy tableau is plenty.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

EPSILON = 1e-6

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"


@dataclass(frozen=True)
class LpResult:
    status: str
    x: np.ndarray
    objective: float


def _pivot(tableau, basis, row, col):
    tableau[row] /= tableau[row, col]
    for r in range(tableau.shape[0]):
        if r != row and abs(tableau[r, col]) > 0:
            tableau[r] -= tableau[r, col] * tableau[row]
    basis[row] = col


def _simplex(tableau, basis, cost, n_cols):
    """Minimize `cost` over the current feasible tableau.  Bland's rule."""
    m = tableau.shape[0]
    # reduced cost row; `neg_obj` tracks the negated objective value
    z = cost.astype(float).copy()
    neg_obj = 0.0
    for r, b in enumerate(basis):
        if abs(z[b]) > 0:
            neg_obj -= z[b] * tableau[r, -1]
            z -= z[b] * tableau[r, :-1]

    while True:
        entering = -1
        for j in range(n_cols):
            if z[j] < -EPSILON:
                entering = j
                break
        if entering < 0:
            return OPTIMAL, -neg_obj, tableau, basis, z
        leaving = -1
        best = None
        for r in range(m):
            coeff = tableau[r, entering]
            if coeff > EPSILON:
                ratio = tableau[r, -1] / coeff
                if (
                    best is None
                    or ratio < best - EPSILON
                    or (abs(ratio - best) <= EPSILON
                        and (leaving < 0 or basis[r] < basis[leaving]))
                ):
                    best = ratio
                    leaving = r
        if leaving < 0:
            return UNBOUNDED, None, tableau, basis, z
        delta = z[entering]
        _pivot(tableau, basis, leaving, entering)
        neg_obj -= delta * tableau[leaving, -1]
        z -= delta * tableau[leaving, :-1]


def solve(c, a_ub, b_ub) -> LpResult:
    """min c.x subject to a_ub @ x <= b_ub and x >= 0."""
    c = np.asarray(c, dtype=float)
    a = np.asarray(a_ub, dtype=float)
    b = np.asarray(b_ub, dtype=float)
    m, n = a.shape
    assert c.shape == (n,) and b.shape == (m,)

    # slack per row; artificial per row whose right-hand side was negative
    negative = b < 0
    a = np.where(negative[:, None], -a, a)
    b = np.abs(b)
    slack_sign = np.where(negative, -1.0, 1.0)
    art_rows = np.flatnonzero(negative)
    n_art = len(art_rows)

    n_total = n + m + n_art
    tableau = np.zeros((m, n_total + 1))
    tableau[:, :n] = a
    tableau[np.arange(m), n + np.arange(m)] = slack_sign
    for k, r in enumerate(art_rows):
        tableau[r, n + m + k] = 1.0
    tableau[:, -1] = b

    basis = [0] * m
    for r in range(m):
        basis[r] = n + r
    for k, r in enumerate(art_rows):
        basis[r] = n + m + k

    if n_art:
        phase1 = np.zeros(n_total)
        phase1[n + m :] = 1.0
        status, value, tableau, basis, _ = _simplex(tableau, basis, phase1, n_total)
        if status != OPTIMAL or value > EPSILON:
            return LpResult(INFEASIBLE, np.zeros(n), float("nan"))
        # pivot any lingering artificial out of the basis if possible
        for r in range(m):
            if basis[r] >= n + m:
                for j in range(n + m):
                    if abs(tableau[r, j]) > EPSILON:
                        _pivot(tableau, basis, r, j)
                        break

    cost = np.zeros(n_total)
    cost[:n] = c
    status, value, tableau, basis, _ = _simplex(tableau, basis, cost, n + m)
    if status != OPTIMAL:
        return LpResult(status, np.zeros(n), float("nan"))
    x = np.zeros(n_total)
    for r, col in enumerate(basis):
        x[col] = tableau[r, -1]
    return LpResult(OPTIMAL, x[:n], float(value))
