"""Row-reduction helpers for small dense matrices.

Everything here works on matrices of at most a few dozen entries per
side, so plain Gaussian elimination with partial pivoting is used
throughout.  A pivot only counts if its magnitude strictly exceeds the
caller-supplied absolute threshold; rank and null spaces inherit that
policy.
"""

from __future__ import annotations

import numpy as np


def row_reduce(mat: np.ndarray, pivot_tol: float) -> tuple[np.ndarray, list[int]]:
    """Reduced row echelon form of ``mat`` and the list of pivot columns."""
    r = np.array(mat, dtype=float)
    if r.ndim != 2:
        raise ValueError("row_reduce expects a 2-d array")
    m, n = r.shape
    pivots: list[int] = []
    row = 0
    for col in range(n):
        if row == m:
            break
        pos = row + int(np.argmax(np.abs(r[row:, col])))
        if abs(r[pos, col]) <= pivot_tol:
            continue
        if pos != row:
            r[[row, pos]] = r[[pos, row]]
        r[row] = r[row] / r[row, col]
        for other in range(m):
            if other != row and r[other, col] != 0.0:
                r[other] = r[other] - r[other, col] * r[row]
        pivots.append(col)
        row += 1
    return r, pivots


def matrix_rank(mat: np.ndarray, pivot_tol: float) -> int:
    """Rank under the pivot-threshold policy of :func:`row_reduce`."""
    return len(row_reduce(mat, pivot_tol)[1])


def null_space(mat: np.ndarray, pivot_tol: float) -> np.ndarray:
    """Null-space basis, one column per free variable.

    Returns an ``(n, n - rank)`` array; the columns are the standard
    back-substituted basis (a 1 in each free coordinate), not
    orthonormalized.
    """
    r, pivots = row_reduce(mat, pivot_tol)
    n = r.shape[1]
    free = [c for c in range(n) if c not in pivots]
    basis = np.zeros((n, len(free)))
    for pos, f in enumerate(free):
        basis[f, pos] = 1.0
        for row, p in enumerate(pivots):
            basis[p, pos] = -r[row, f]
    return basis
