"""Cyclic Jacobi eigenvalues for stacks of small symmetric matrices.

All matrices in a stack are rotated in lockstep: for each pivot pair (p, q)
every matrix gets its own rotation angle, which keeps the work vectorized
over the stack. Orders stay small here (Gram matrices of at most ~20
columns), where Jacobi is accurate and simple.
"""
import numpy as np

OFFDIAG_TOL = 1e-12
MAX_SWEEPS = 60


def _off_norm(a):
    mask = ~np.eye(a.shape[-1], dtype=bool)
    off = a[:, mask]
    return np.sqrt(np.sum(off * off, axis=1))


def jacobi_eigvalsh(a, tol=OFFDIAG_TOL, max_sweeps=MAX_SWEEPS):
    """Eigenvalues (ascending) of symmetric matrices of shape (..., k, k).

    Sweeps stop once the off-diagonal Frobenius norm of every matrix is at
    most ``tol`` times its full Frobenius norm.
    """
    a = np.array(a, dtype=np.float64, copy=True)
    if a.ndim < 2 or a.shape[-1] != a.shape[-2]:
        raise ValueError(f"expected stack of square matrices, got shape {a.shape}")
    lead = a.shape[:-2]
    k = a.shape[-1]
    a = a.reshape((-1, k, k))
    a = 0.5 * (a + a.transpose(0, 2, 1))
    if k > 1 and a.shape[0] > 0:
        scale = np.sqrt(np.sum(a * a, axis=(1, 2)))
        for _ in range(max_sweeps):
            off = _off_norm(a)
            if np.all(off <= tol * scale):
                break
            for p in range(k - 1):
                for q in range(p + 1, k):
                    _rotate(a, p, q)
        else:
            raise RuntimeError("Jacobi iteration did not converge")
    ev = np.einsum("bii->bi", a).copy()
    ev.sort(axis=1)
    return ev.reshape(lead + (k,))


def _rotate(a, p, q):
    apq = a[:, p, q]
    active = apq != 0.0
    if not np.any(active):
        return
    app = a[:, p, p]
    aqq = a[:, q, q]
    with np.errstate(divide="ignore", invalid="ignore", over="ignore"):
        theta = np.where(active, (aqq - app) / (2.0 * np.where(active, apq, 1.0)), 0.0)
        sgn = np.where(theta >= 0.0, 1.0, -1.0)
        t = sgn / (np.abs(theta) + np.sqrt(theta * theta + 1.0))
    # theta**2 overflowing gives t = 0; apq is then negligible and zeroed below
    t = np.where(active, t, 0.0)
    c = 1.0 / np.sqrt(t * t + 1.0)
    s = t * c
    c_ = c[:, None]
    s_ = s[:, None]
    col_p = a[:, :, p].copy()
    col_q = a[:, :, q].copy()
    a[:, :, p] = c_ * col_p - s_ * col_q
    a[:, :, q] = s_ * col_p + c_ * col_q
    row_p = a[:, p, :].copy()
    row_q = a[:, q, :].copy()
    a[:, p, :] = c_ * row_p - s_ * row_q
    a[:, q, :] = s_ * row_p + c_ * row_q
    a[:, p, q] = 0.0
    a[:, q, p] = 0.0
