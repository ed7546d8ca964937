"""Exact desk-scale solvers for the weighted 0- and 1-norm problems,
plus dual certificates for weighted 1-norm uniqueness.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field

import numpy as np

from .core import (
    NONZERO_TOL,
    SupportDecomposition,
    WeightedNormParams,
    as_matrix,
    as_signal,
    decompose_support,
    sign,
    support,
    weighted_l1,
    weighted_norm,
)
from .errors import DegenerateDenominator, Inconsistent, RankDeficient, TooLarge
from .simplex import simplex

L0_MAX_N = 24
OBJECTIVE_TOL = 1e-9
SAME_VECTOR_TOL = 1e-9
RANK_RTOL = 1e-8
CERT_MARGIN = 1e-9


class Uniqueness(str, enum.Enum):
    YES = "yes"
    NO = "no"
    INCONCLUSIVE = "inconclusive"


@dataclass
class RecoveryResult:
    minimizers: list
    objective: float
    unique: Uniqueness
    residual: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def x(self) -> np.ndarray:
        return self.minimizers[0]


@dataclass
class DualCertificate:
    gamma: np.ndarray
    correlations: np.ndarray
    strict: bool
    max_off_support: float
    target: np.ndarray


def fit_tolerance(y) -> float:
    return 1e-8 * (1.0 + float(np.linalg.norm(y)))


def _residual(A, x, y):
    r = A @ x - y
    return float(np.abs(r).max()) if r.size else 0.0


def _full_column_rank(M):
    if M.shape[1] == 0:
        return True
    if M.shape[1] > M.shape[0]:
        return False
    sv = np.linalg.svd(M, compute_uv=False)
    return bool(sv[-1] > RANK_RTOL * sv[0])


def _support_fit(A, y, S, tol):
    """Least-squares fit of y on columns S. Returns (x, fits, full_rank)."""
    n = A.shape[1]
    x = np.zeros(n)
    if not S:
        return x, float(np.abs(y).max(initial=0.0)) <= tol, True
    cols = A[:, S]
    z, _, rank, _ = np.linalg.lstsq(cols, y, rcond=None)
    x[list(S)] = z
    return x, _residual(A, x, y) <= tol, rank == len(S)


def _check_consistent(A, y):
    tol = fit_tolerance(y)
    x, _, _, _ = np.linalg.lstsq(A, y, rcond=None)
    res = _residual(A, x, y)
    if res > tol:
        raise Inconsistent(f"y is not in the range of A (residual {res:.3e})")


def _cost_levels(k, n_out, w):
    """(cost, a, b) for a = |S & T|, b = |S - T|, sorted by weighted cost."""
    levels = [(w * a + b, a, b) for a in range(k + 1) for b in range(n_out + 1)]
    levels.sort(key=lambda lv: (lv[0], lv[1] + lv[2], lv[1]))
    return levels


def _dedupe(vectors):
    out = []
    for v in vectors:
        if not any(np.max(np.abs(v - u)) <= SAME_VECTOR_TOL for u in out):
            out.append(v)
    return out


def solve_weighted_l0(A, y, params: WeightedNormParams) -> RecoveryResult:
    """Minimize ``w||x_T||_0 + ||x_{T^c}||_0`` subject to ``Ax = y``.

    Supports are scanned in order of their weighted cost
    ``w|S & T| + |S - T|``; the scan stops after the first cost level at
    which some support explains y, so every cheaper level has already been
    ruled out and no more expensive support can be needed. Costs are
    compared in real arithmetic with tolerance 1e-9.

    All minimizers at the optimal level are returned. When a fitting
    support has dependent columns, the solution set at that cost is a
    continuum, so a second point of it is listed and the result is not
    unique.
    """
    A = as_matrix(A).entries
    y = as_signal(y, A.shape[0])
    m, n = A.shape
    if n > L0_MAX_N:
        raise TooLarge(f"n={n} exceeds the enumeration bound {L0_MAX_N}")
    params.weights(n)  # validates T against n
    _check_consistent(A, y)
    tol = fit_tolerance(y)

    T = list(params.T)
    Tc = [i for i in range(n) if i not in set(T)]
    levels = _cost_levels(len(T), len(Tc), params.w)

    found = []
    rank_deficient = False
    best = None
    tested = 0
    for cost, a, b in levels:
        if best is not None and cost > best + OBJECTIVE_TOL:
            break
        for inner in itertools.combinations(T, a):
            for outer in itertools.combinations(Tc, b):
                S = tuple(sorted(inner + outer))
                tested += 1
                x, fits, full = _support_fit(A, y, S, tol)
                if not fits:
                    continue
                if best is None:
                    best = cost
                found.append(x)
                if not full:
                    rank_deficient = True
                    found.extend(_null_perturbations(A, S, x, params, best))
    if best is None:
        raise Inconsistent("no support explains y")

    minimizers = _dedupe(found)
    unique = Uniqueness.YES if len(minimizers) == 1 else Uniqueness.NO
    return RecoveryResult(
        minimizers=minimizers,
        objective=float(best),
        unique=unique,
        residual=max(_residual(A, x, y) for x in minimizers),
        diagnostics={
            "supports_tested": tested,
            "rank_deficient_support": rank_deficient,
        },
    )


def _null_perturbations(A, S, x, params, best):
    # another solution on S, still within the optimal weighted cost
    cols = A[:, list(S)]
    _, sv, vt = np.linalg.svd(cols)
    rank = int(np.sum(sv > RANK_RTOL * sv[0])) if sv.size else 0
    out = []
    if rank < len(S):
        z = np.zeros(A.shape[1])
        z[list(S)] = vt[-1]
        scale = max(1.0, float(np.abs(x).max()))
        other = x + scale * z
        if weighted_norm(other, 0, params) <= best + OBJECTIVE_TOL:
            out.append(other)
    return out


def solve_weighted_l1(A, y, params: WeightedNormParams) -> RecoveryResult:
    """Minimize ``sum_i w_i |x_i|`` subject to ``Ax = y`` by simplex.

    The LP uses the split ``x = x+ - x-`` with ``x+, x- >= 0`` and cost
    ``w_i`` on both halves. The returned vertex is re-solved on its basic
    columns to remove tableau round-off. Uniqueness is reported as YES only
    when a strict dual certificate exists on the recovered support and the
    columns on T plus that support are independent; otherwise INCONCLUSIVE.
    """
    A = as_matrix(A).entries
    y = as_signal(y, A.shape[0])
    m, n = A.shape
    wv = params.weights(n)
    _check_consistent(A, y)

    M = np.hstack([A, -A])
    cost = np.concatenate([wv, wv])
    lp = simplex(M, y, cost)
    x = lp.z[:n] - lp.z[n:]
    x = _polish(A, y, x, lp.basis, n)
    x[np.abs(x) <= NONZERO_TOL] = 0.0

    decomp = decompose_support(support(x), params.T, n)
    diagnostics = {"lp_iterations": lp.iterations, "lp_objective": lp.objective}
    try:
        cert = build_certificate(A, decomp, x, params.w)
        unique = verify_l1_uniqueness(A, decomp, x, params.w, cert)
        diagnostics.update(max_off_support=cert.max_off_support, strict=cert.strict)
    except RankDeficient:
        unique = Uniqueness.INCONCLUSIVE
        diagnostics.update(max_off_support=None, strict=False, rank_deficient=True)
    return RecoveryResult(
        minimizers=[x],
        objective=weighted_l1(x, wv),
        unique=unique,
        residual=_residual(A, x, y),
        diagnostics=diagnostics,
    )


def _polish(A, y, x, basis, n):
    cols = sorted({j % n for j in basis if abs(x[j % n]) > 0.0})
    if not cols:
        return x
    sub = A[:, cols]
    if not _full_column_rank(sub):
        return x
    z, *_ = np.linalg.lstsq(sub, y, rcond=None)
    # a sign flip would mean the basis solve disagrees with the vertex
    if np.any(np.sign(z) != np.sign(x[cols])):
        return x
    out = np.zeros(n)
    out[cols] = z
    if _residual(A, out, y) > _residual(A, x, y) and _residual(A, x, y) <= fit_tolerance(y):
        return x
    return out


def build_certificate(A, decomp: SupportDecomposition, x, w: float) -> DualCertificate:
    """Least-norm gamma with ``gamma'a_i = c_i`` on ``S = T | Delta``.

    ``c_i = w sgn(x_i)`` on T, ``sgn(x_i)`` on Delta, 0 elsewhere, with
    ``sgn(0) = 0``. The certificate is strict when every correlation off S
    is below ``1 - 1e-9`` in magnitude.
    """
    A = as_matrix(A).entries
    n = A.shape[1]
    x = as_signal(x, n)
    S = list(decomp.T_union_delta)
    sg = sign(x)
    c = np.zeros(n)
    c[list(decomp.T)] = w * sg[list(decomp.T)]
    c[list(decomp.delta)] = sg[list(decomp.delta)]
    if S:
        cols = A[:, S]
        if not _full_column_rank(cols):
            raise RankDeficient(f"columns {S} are linearly dependent")
        gamma, *_ = np.linalg.lstsq(cols.T, c[S], rcond=None)
    else:
        gamma = np.zeros(A.shape[0])
    corr = A.T @ gamma
    off = np.ones(n, dtype=bool)
    off[S] = False
    max_off = float(np.abs(corr[off]).max()) if off.any() else 0.0
    return DualCertificate(
        gamma=gamma,
        correlations=corr,
        strict=max_off < 1.0 - CERT_MARGIN,
        max_off_support=max_off,
        target=c,
    )


def verify_l1_uniqueness(A, decomp: SupportDecomposition, x, w, cert: DualCertificate) -> Uniqueness:
    """YES when the certificate is strict and A restricted to T | Delta is
    injective; INCONCLUSIVE otherwise. Never NO: failing a sufficient test
    says nothing about uniqueness.
    """
    A = as_matrix(A).entries
    S = list(decomp.T_union_delta)
    if cert.strict and _full_column_rank(A[:, S]):
        return Uniqueness.YES
    return Uniqueness.INCONCLUSIVE


def certificate_bound(delta_s, theta_s, theta_s_2s, s, c_norm) -> float:
    """``theta_s ||c|| / ((1 - delta_s - theta_{s,2s}) sqrt(s))``, the bound on
    off-support correlations of the interpolating vector.
    """
    denom = 1.0 - delta_s - theta_s_2s
    if denom <= 0:
        raise DegenerateDenominator(f"1 - delta_s - theta_(s,2s) = {denom} <= 0")
    return theta_s * c_norm / (denom * np.sqrt(s))
