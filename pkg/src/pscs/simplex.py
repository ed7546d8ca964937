"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c'z  s.t.  M z = b, z >= 0``. Bland's rule (lowest-index
entering column, lowest-index leaving basic variable on ratio ties)
guarantees termination, which matters here because sparse-recovery LPs are
heavily degenerate.
"""
from dataclasses import dataclass

import numpy as np

from .errors import Inconsistent, Unbounded

PIVOT_TOL = 1e-9
COST_TOL = 1e-10


@dataclass
class LPResult:
    z: np.ndarray
    objective: float
    basis: list
    iterations: int


def _pivot(tab, row, col):
    tab[row] /= tab[row, col]
    piv = tab[row]
    for i in range(tab.shape[0]):
        if i != row and tab[i, col] != 0.0:
            tab[i] -= tab[i, col] * piv


def _run(tab, basis, ncols, max_iter):
    """Iterate on `tab` whose last row holds reduced costs and -objective.

    Only the first `ncols` columns may enter. Returns the iteration count.
    """
    m = len(basis)
    it = 0
    while True:
        costs = tab[m, :ncols]
        entering = np.flatnonzero(costs < -COST_TOL)
        if entering.size == 0:
            return it
        if it >= max_iter:
            raise RuntimeError(f"simplex exceeded {max_iter} iterations")
        col = int(entering[0])
        column = tab[:m, col]
        rhs = tab[:m, -1]
        best_row = -1
        best_ratio = np.inf
        for i in range(m):
            if column[i] > PIVOT_TOL:
                ratio = rhs[i] / column[i]
                if ratio < best_ratio - 1e-12 or (
                    abs(ratio - best_ratio) <= 1e-12 and basis[i] < basis[best_row]
                ):
                    best_ratio = ratio
                    best_row = i
        if best_row < 0:
            raise Unbounded(f"column {col} can grow without bound")
        _pivot(tab, best_row, col)
        basis[best_row] = col
        it += 1


def simplex(M, b, c, max_iter=None) -> LPResult:
    M = np.array(M, dtype=np.float64)
    b = np.array(b, dtype=np.float64)
    c = np.asarray(c, dtype=np.float64)
    m, n = M.shape
    if max_iter is None:
        max_iter = 100 * (m + n)

    neg = b < 0
    M[neg] *= -1
    b[neg] *= -1

    # phase 1: artificials n .. n+m-1 start in the basis
    tab = np.zeros((m + 1, n + m + 1))
    tab[:m, :n] = M
    tab[:m, n : n + m] = np.eye(m)
    tab[:m, -1] = b
    tab[m, :n] = -M.sum(axis=0)
    tab[m, -1] = -b.sum()
    basis = list(range(n, n + m))
    iters = _run(tab, basis, n + m, max_iter)

    infeas = -tab[m, -1]
    if infeas > 1e-8 * (1.0 + np.abs(b).max(initial=0.0)):
        raise Inconsistent(f"no nonnegative solution (phase-1 residual {infeas:.3e})")

    # drive artificials out of the basis; rows where that is impossible are redundant
    keep = []
    for i in range(m):
        if basis[i] >= n:
            cand = np.flatnonzero(np.abs(tab[i, :n]) > PIVOT_TOL)
            if cand.size:
                _pivot(tab, i, int(cand[0]))
                basis[i] = int(cand[0])
                keep.append(i)
        else:
            keep.append(i)
    rows = keep
    tab2 = np.zeros((len(rows) + 1, n + 1))
    tab2[:-1, :n] = tab[rows, :n]
    tab2[:-1, -1] = tab[rows, -1]
    basis = [basis[i] for i in rows]

    # phase 2 reduced costs
    tab2[-1, :n] = c
    for i, j in enumerate(basis):
        if c[j] != 0.0:
            tab2[-1] -= c[j] * tab2[i]
    iters += _run(tab2, basis, n, max_iter)

    z = np.zeros(n)
    for i, j in enumerate(basis):
        z[j] = tab2[i, -1]
    z = np.maximum(z, 0.0)
    return LPResult(z, float(c @ z), basis, iters)
