"""Dense strictly convex QP with linear inequality constraints.

    minimize    1/2 x^T H x + g^T x
    subject to  A x + b >= 0

The dual active-set solver of the ``quadprog`` package does the work.  It
needs linearly independent active constraints, so rows acting on a single
variable are first merged into one interval per variable; an interval that
collapses to a point becomes an equality.  This removes the opposing pairs
produced by locked joints and by joint limits that coincide with step
bounds.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import quadprog


@dataclass
class QPProblem:
    H: np.ndarray
    g: np.ndarray
    A: np.ndarray
    b: np.ndarray

    @property
    def n(self):
        return len(self.g)

    def objective(self, x):
        return 0.5 * x @ self.H @ x + self.g @ x


@dataclass
class QPResult:
    x: np.ndarray
    multipliers: np.ndarray
    status: str          # "optimal" | "infeasible"
    iterations: int
    active: list


def kkt_residuals(problem: QPProblem, x, lam):
    """Stationarity, primal violation, complementarity, dual violation (inf-norms)."""
    A = np.asarray(problem.A, float).reshape(-1, problem.n)
    s = A @ x + problem.b
    stat = problem.H @ x + problem.g - A.T @ lam
    return {
        "stationarity": float(np.max(np.abs(stat), initial=0.0)),
        "violation": float(np.max(-s, initial=0.0)),
        "complementarity": float(np.max(np.abs(lam * s), initial=0.0)),
        "dual": float(np.max(-lam, initial=0.0)),
    }


def _merge_bounds(A, b):
    """Split rows into per-variable intervals and general rows.

    Returns ``(lo, hi, lo_row, hi_row, general)`` where ``lo_row[j]`` is the
    index of the row defining the lower bound of variable ``j`` (-1 if none).
    """
    n = A.shape[1]
    lo, hi = np.full(n, -np.inf), np.full(n, np.inf)
    lo_row, hi_row = np.full(n, -1), np.full(n, -1)
    nz = np.abs(A) > 0
    single = nz.sum(axis=1) == 1
    general = list(np.flatnonzero(~single))
    for i in np.flatnonzero(single):
        j = int(np.flatnonzero(nz[i])[0])
        c = A[i, j]
        bound = -b[i] / c
        if c > 0 and bound > lo[j]:
            lo[j], lo_row[j] = bound, i
        elif c < 0 and bound < hi[j]:
            hi[j], hi_row[j] = bound, i
    return lo, hi, lo_row, hi_row, general


def _quadprog(H, g, C, d, meq):
    try:
        if len(d):
            x, _, _, iters, mult, _ = quadprog.solve_qp(H, -g, C.T.copy(), d, meq)
        else:
            x, _, _, iters, mult, _ = quadprog.solve_qp(H, -g)
    except ValueError as exc:
        if "inconsistent" in str(exc):
            return None
        raise
    return x, iters, mult


def solve_qp(problem: QPProblem, tol=1e-11) -> QPResult:
    H, g = np.asarray(problem.H, float), np.asarray(problem.g, float)
    n = len(g)
    A = np.asarray(problem.A, float).reshape(-1, n)
    b = np.asarray(problem.b, float)
    m = len(b)
    lo, hi, lo_row, hi_row, general = _merge_bounds(A, b)
    if np.any(lo > hi + tol):
        return QPResult(np.zeros(n), np.zeros(m), "infeasible", 0, [])
    fixed = np.flatnonzero(hi - lo <= tol)
    free = set(range(n)) - set(fixed)
    lower = [j for j in np.flatnonzero(np.isfinite(lo)) if j in free]
    upper = [j for j in np.flatnonzero(np.isfinite(hi)) if j in free]
    # quadprog form: C^T x >= d with the first meq rows as equalities
    eye = np.eye(n)
    blocks = [(eye[fixed], 0.5 * (lo[fixed] + hi[fixed])),
              (eye[lower], lo[lower]),
              (-eye[upper], -hi[upper]),
              (A[general], -b[general])]
    C = np.vstack([blk[0].reshape(-1, n) for blk in blocks])
    d = np.concatenate([blk[1] for blk in blocks])
    sol = _quadprog(H, g, C, d, len(fixed))
    if sol is None:
        # degenerate vertices can trip the solver; retry with a tiny relaxation
        relax = np.zeros_like(d)
        relax[len(fixed):] = 1e-10 * (1.0 + np.abs(d[len(fixed):]))
        sol = _quadprog(H, g, C, d - relax, len(fixed))
        if sol is not None and kkt_residuals(problem, sol[0], np.zeros(m))["violation"] > 1e-8:
            sol = None
    if sol is None:
        return QPResult(np.zeros(n), np.zeros(m), "infeasible", 0, [])
    x, iters, mult = sol
    # map reduced multipliers back onto the original rows
    full = np.zeros(m)
    k = 0
    for j in fixed:
        mu = mult[k]
        if mu >= 0 and lo_row[j] >= 0:
            full[lo_row[j]] = mu / abs(A[lo_row[j], j])
        elif hi_row[j] >= 0:
            full[hi_row[j]] = -mu / abs(A[hi_row[j], j])
        k += 1
    for j in lower:
        full[lo_row[j]] = mult[k] / abs(A[lo_row[j], j])
        k += 1
    for j in upper:
        full[hi_row[j]] = mult[k] / abs(A[hi_row[j], j])
        k += 1
    full[general] = mult[k:]
    active = [int(i) for i in np.flatnonzero(full > 0)]
    return QPResult(np.asarray(x), full, "optimal", int(np.atleast_1d(iters)[0]), active)
