"""Phase-1 simplex feasibility solver (dense tableau, Bland's rule).

Solves: find z >= 0 with C z = b.  Sized for the tiny systems arising from
transfer-matrix synthesis (a few dozen rows/columns), where a plain dense
tableau is both simplest and fully adequate.
"""

from __future__ import annotations

import numpy as np


class InfeasibleError(Exception):
    """The equality system C z = b has no nonnegative solution."""


def phase1_feasible(c_mat: np.ndarray, b: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Return some z >= 0 with C z = b, or raise InfeasibleError.

    Phase-1 simplex: minimize the sum of artificial variables with Bland's
    anti-cycling rule (entering = lowest eligible index, leaving = lowest
    basic index among minimal ratios).
    """
    c_mat = np.asarray(c_mat, dtype=float)
    b = np.asarray(b, dtype=float)
    m, n = c_mat.shape
    if b.shape != (m,):
        raise ValueError("right-hand side length must match the row count")

    # b >= 0 normalization, then tableau [C | I | b] with artificial basis.
    c_mat = c_mat.copy()
    b = b.copy()
    neg = b < 0
    c_mat[neg] *= -1.0
    b[neg] *= -1.0

    tab = np.zeros((m, n + m + 1))
    tab[:, :n] = c_mat
    tab[:, n:n + m] = np.eye(m)
    tab[:, -1] = b
    basis = list(range(n, n + m))

    # reduced cost row for min sum(artificials): cost_j = -sum_i tab[i, j]
    cost = -tab.sum(axis=0)
    cost[n:n + m] = 0.0

    max_pivots = 50000
    for _ in range(max_pivots):
        enter = -1
        for j in range(n + m):
            if cost[j] < -tol:
                enter = j
                break
        if enter < 0:
            break
        ratios = []
        col = tab[:, enter]
        for i in range(m):
            if col[i] > tol:
                ratios.append((tab[i, -1] / col[i], basis[i], i))
        if not ratios:
            raise InfeasibleError("phase-1 objective unbounded; system is inconsistent")
        rmin = min(r[0] for r in ratios)
        # Bland: among minimal ratios, leave the smallest basic variable index
        leave_row = min(
            (bi, i) for r, bi, i in ratios if r <= rmin + tol * max(1.0, abs(rmin))
        )[1]
        piv = tab[leave_row, enter]
        tab[leave_row] /= piv
        for i in range(m):
            if i != leave_row and abs(tab[i, enter]) > 0.0:
                tab[i] -= tab[i, enter] * tab[leave_row]
        cost = cost - cost[enter] * tab[leave_row]
        basis[leave_row] = enter
    else:
        raise InfeasibleError("phase-1 simplex did not terminate")

    objective = sum(tab[i, -1] for i in range(m) if basis[i] >= n)
    if objective > tol * max(1.0, float(np.abs(b).max(initial=0.0))) * 100:
        raise InfeasibleError(f"no nonnegative solution (phase-1 objective {objective:.3e})")

    z = np.zeros(n)
    for i, bi in enumerate(basis):
        if bi < n:
            z[bi] = max(tab[i, -1], 0.0)
    return z
