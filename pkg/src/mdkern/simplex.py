"""Dense phase-1 simplex for {A x = b, x >= 0} with Bland's anti-cycling rule.

Works on float64 tableaus or, with ``exact=True``, on object arrays of Fractions.
Besides a feasible point it returns the phase-1 dual vector y. When the system is
infeasible, y is a Farkas certificate: y^T A <= 0 and y^T b > 0.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import SolverError


@dataclass
class PhaseOneResult:
    feasible: bool
    x: np.ndarray
    y: np.ndarray
    objective: object
    pivots: int


def _tableau(A, b, exact: bool):
    m, N = A.shape
    dtype = object if exact else float
    conv = Fraction if exact else float
    T = np.empty((m + 1, N + m + 1), dtype=dtype)
    T[...] = conv(0)
    for i in range(m):
        for j in range(N):
            T[i, j] = conv(A[i, j])
        T[i, N + i] = conv(1)
        T[i, -1] = conv(b[i])
    T[m, :N] = -T[:m, :N].sum(axis=0)
    T[m, -1] = -T[:m, -1].sum()
    return T


def phase_one(A, b, *, exact: bool = False, pivot_tol: float = 1e-10, max_pivots: int | None = None):
    """Minimize the sum of artificial variables for A x + a = b, x, a >= 0.

    ``pivot_tol`` is relative to the largest |entry| of A and b; it is ignored in
    exact mode. Raises :class:`SolverError` if the pivot budget runs out.
    """
    A = np.asarray(A, dtype=object if exact else float)
    b = np.asarray(b, dtype=object if exact else float).reshape(-1)
    m, N = A.shape
    flip = np.array([bi < 0 for bi in b])
    A = A.copy()
    b = b.copy()
    A[flip] = -A[flip]
    b[flip] = -b[flip]

    T = _tableau(A, b, exact)
    basis = list(range(N, N + m))
    if exact:
        eps = 0
        tie = 0
    else:
        ref = max(1.0, float(np.max(np.abs(A), initial=0.0)), float(np.max(np.abs(b), initial=0.0)))
        eps = pivot_tol * ref
        tie = 1e-12
    limit = max_pivots if max_pivots is not None else 50 * (N + m) + 1000

    pivots = 0
    while True:
        rc = T[m, : N + m]
        candidates = np.nonzero(rc < -eps)[0]
        if candidates.size == 0:
            break
        j = int(candidates[0])
        col = T[:m, j]
        rows = np.nonzero(col > eps)[0]
        if rows.size == 0:
            # phase-1 objective is bounded below by 0; a ray here is a numerical artifact
            raise SolverError("phase-1 simplex found an unbounded direction")
        ratios = [T[i, -1] / col[i] for i in rows]
        best = min(ratios)
        slack = tie * (1 + abs(float(best))) if not exact else 0
        tied = [int(i) for i, r in zip(rows, ratios) if r - best <= slack]
        r = min(tied, key=lambda i: basis[i])

        T[r] = T[r] / T[r, j]
        factors = T[:, j].copy()
        factors[r] = 0
        T -= np.outer(factors, T[r])
        if not exact:
            T[:, j] = 0.0
            T[r, j] = 1.0
        basis[r] = j
        pivots += 1
        if pivots > limit:
            raise SolverError(f"phase-1 simplex exceeded {limit} pivots")

    zero = Fraction(0) if exact else 0.0
    x = np.array([zero] * (N + m), dtype=object if exact else float)
    for i, bv in enumerate(basis):
        x[bv] = T[i, -1]
    objective = -T[m, -1]
    one = Fraction(1) if exact else 1.0
    y = np.array([one - T[m, N + i] for i in range(m)], dtype=object if exact else float)
    y[flip] = -y[flip]
    if exact:
        feasible = objective == 0
    else:
        feasible = objective <= eps * max(1, m)
    return PhaseOneResult(bool(feasible), x[:N], y, objective, pivots)
