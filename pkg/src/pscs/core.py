"""Basic types, weighted norms, support-set algebra and coherence."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionMismatch,
    IndexOutOfRange,
    TooFewColumns,
    ZeroColumn,
)

# |x_i| above this counts as a nonzero entry
NONZERO_TOL = 1e-12
ZERO_COLUMN_TOL = 1e-14


def as_index_set(idx, n=None):
    """Return `idx` as a sorted, duplicate-free tuple of ints.

    Raises IndexOutOfRange when `n` is given and an index falls outside
    ``[0, n)``.
    """
    out = tuple(sorted({int(i) for i in idx}))
    if n is not None and out and (out[0] < 0 or out[-1] >= n):
        raise IndexOutOfRange(f"index set {out} not contained in [0, {n})")
    return out


@dataclass(frozen=True)
class SensingMatrix:
    """Dense real m x n matrix with cached column norms.

    The entries are stored read-only. Columns are used exactly as given; no
    normalization happens here.
    """

    entries: np.ndarray
    column_norms: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        a = np.array(self.entries, dtype=np.float64, copy=True)
        if a.ndim != 2:
            raise DimensionMismatch(f"expected a 2-d array, got shape {a.shape}")
        # zero columns is allowed so that an empty column selection is representable
        if a.shape[0] < 1:
            raise DimensionMismatch(f"matrix needs at least one row, got {a.shape}")
        if not np.all(np.isfinite(a)):
            raise ValueError("matrix entries must be finite")
        a.setflags(write=False)
        norms = np.linalg.norm(a, axis=0)
        norms.setflags(write=False)
        object.__setattr__(self, "entries", a)
        object.__setattr__(self, "column_norms", norms)

    @property
    def m(self) -> int:
        return self.entries.shape[0]

    @property
    def n(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self):
        return self.entries.shape

    def column(self, i: int) -> np.ndarray:
        return self.entries[:, i]

    def __array__(self, dtype=None, copy=None):
        if dtype is None:
            return self.entries
        return self.entries.astype(dtype)

    def __eq__(self, other):
        if not isinstance(other, SensingMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    __hash__ = None


def as_matrix(A) -> SensingMatrix:
    if isinstance(A, SensingMatrix):
        return A
    return SensingMatrix(A)


def as_signal(x, n=None) -> np.ndarray:
    """Validate a signal vector: 1-d, finite, optionally of length `n`."""
    v = np.asarray(x, dtype=np.float64)
    if v.ndim != 1:
        raise DimensionMismatch(f"signal must be 1-d, got shape {v.shape}")
    if n is not None and v.shape[0] != n:
        raise DimensionMismatch(f"signal has length {v.shape[0]}, expected {n}")
    if not np.all(np.isfinite(v)):
        raise ValueError("signal entries must be finite")
    return v


def support(x, tol=NONZERO_TOL):
    """Indices where ``|x_i| > tol``, as a sorted tuple."""
    x = np.asarray(x)
    return tuple(int(i) for i in np.flatnonzero(np.abs(x) > tol))


def sign(x, tol=NONZERO_TOL):
    """Elementwise sign with entries of magnitude <= tol mapped to 0."""
    x = np.asarray(x, dtype=np.float64)
    return np.where(np.abs(x) > tol, np.sign(x), 0.0)


@dataclass(frozen=True)
class WeightedNormParams:
    """Prior support `T` and the weight `w` applied on it.

    Entries off `T` carry weight 1. `n` is optional; when set, it fixes the
    ambient dimension and is checked against signals.
    """

    T: tuple
    w: float
    n: int | None = None

    def __post_init__(self):
        w = float(self.w)
        if not 0.0 <= w <= 1.0:
            raise ValueError(f"weight must lie in [0, 1], got {w}")
        object.__setattr__(self, "w", w)
        object.__setattr__(self, "T", as_index_set(self.T, self.n))

    def weights(self, n: int) -> np.ndarray:
        if self.n is not None and self.n != n:
            raise DimensionMismatch(f"params are for n={self.n}, got n={n}")
        if self.T and self.T[-1] >= n:
            raise DimensionMismatch(f"prior support {self.T} exceeds dimension {n}")
        wv = np.ones(n)
        wv[list(self.T)] = self.w
        return wv


def weighted_norm(x, p: int, params: WeightedNormParams) -> float:
    """Weighted 0- or 1-norm ``w*||x_T||_p + ||x_{T^c}||_p``.

    Summed as ``sum_i w_i * f(x_i)`` in one pass so that ``w = 1``
    reproduces the plain norm bit for bit.
    """
    x = as_signal(x)
    wv = params.weights(x.shape[0])
    if p == 0:
        return float(np.sum(wv * (np.abs(x) > NONZERO_TOL)))
    if p == 1:
        return weighted_l1(x, wv)
    raise ValueError(f"p must be 0 or 1, got {p!r}")


def weighted_l1(x, wv) -> float:
    return float(np.sum(wv * np.abs(x)))


@dataclass(frozen=True)
class SupportDecomposition:
    """True support `N` split against the prior support `T`.

    Derived sets: ``delta1 = T & N``, ``delta = N - T`` and the erroneous
    part of the prior ``E = T - N``.
    """

    n: int
    N: tuple
    T: tuple
    delta1: tuple
    delta: tuple
    E: tuple

    @property
    def s(self) -> int:
        return len(self.N)

    @property
    def k(self) -> int:
        return len(self.T)

    @property
    def t(self) -> int:
        return len(self.delta1)

    @property
    def u(self) -> int:
        return len(self.delta)

    @property
    def e(self) -> int:
        return len(self.E)

    @property
    def T_union_delta(self) -> tuple:
        return tuple(sorted(set(self.T) | set(self.delta)))

    def sizes(self):
        """(s, k, t, u, e)"""
        return self.s, self.k, self.t, self.u, self.e


def decompose_support(N, T, n: int) -> SupportDecomposition:
    N = as_index_set(N, n)
    T = as_index_set(T, n)
    sN, sT = set(N), set(T)
    return SupportDecomposition(
        n=n,
        N=N,
        T=T,
        delta1=tuple(sorted(sN & sT)),
        delta=tuple(sorted(sN - sT)),
        E=tuple(sorted(sT - sN)),
    )


def submatrix_columns(A, S) -> SensingMatrix:
    """Columns of `A` indexed by `S`, in ascending index order."""
    A = as_matrix(A)
    S = as_index_set(S, A.n)
    return SensingMatrix(A.entries[:, list(S)])


def coherence(A) -> float:
    """Largest absolute normalized inner product between distinct columns."""
    A = as_matrix(A)
    if A.n < 2:
        raise TooFewColumns(f"coherence needs at least 2 columns, got {A.n}")
    norms = A.column_norms
    if np.any(norms <= ZERO_COLUMN_TOL):
        bad = np.flatnonzero(norms <= ZERO_COLUMN_TOL).tolist()
        raise ZeroColumn(f"columns {bad} have (near) zero norm")
    U = A.entries / norms
    G = np.abs(U.T @ U)
    np.fill_diagonal(G, 0.0)
    return float(G.max())
