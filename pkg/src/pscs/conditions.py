"""Sufficient uniqueness conditions evaluated as explicit numeric verdicts.

Every check takes precomputed constants (delta/theta/coherence values), not
matrices; ``pscs.harness`` wires them to exact values from ``pscs.ric``.
All comparisons are strict and use plain float ``<`` with no slack, so a
left-hand side sitting exactly on its threshold fails.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from .errors import (
    BadDecomposition,
    DeltaKTooLarge,
    EmptySupportUnion,
    MissingConstant,
    NegativeConstant,
)

CANDES0 = "candes0"
CANDES1 = "candes1"
COHERENCE = "coherence"
VASWANI0 = "vaswani0"
VASWANI1 = "vaswani1"
VASWANI_COR = "vaswani-cor"
WEIGHTED0 = "w0"
WEIGHTED1 = "w1"
WEIGHTED1_RIC = "w1-ric"

CONDITION_NAMES = (
    CANDES0,
    CANDES1,
    COHERENCE,
    VASWANI0,
    VASWANI1,
    VASWANI_COR,
    WEIGHTED0,
    WEIGHTED1,
    WEIGHTED1_RIC,
)

DEGENERATE_TOL = 1e-12
ZERO_COHERENCE_TOL = 1e-14
# sqrt(2) / (1 + 2 sqrt(2)), about 0.3694
RIC_ONLY_THRESHOLD = math.sqrt(2.0) / (1.0 + 2.0 * math.sqrt(2.0))


@dataclass(frozen=True)
class ConditionVerdict:
    name: str
    lhs: float
    threshold: float
    holds: bool
    inputs: dict = field(default_factory=dict)
    degenerate: bool = False
    order: int | None = None
    reason: str = ""

    def as_row(self) -> dict:
        return {
            "name": self.name,
            "lhs": self.lhs,
            "threshold": self.threshold,
            "holds": self.holds,
            "degenerate": self.degenerate,
            "order_used": self.order,
        }


def _strict(name, lhs, threshold, inputs, order=None, reason=""):
    return ConditionVerdict(
        name, float(lhs), float(threshold), bool(lhs < threshold), inputs, False, order, reason
    )


def _degenerate(name, threshold, inputs, reason, order=None, lhs=math.nan):
    return ConditionVerdict(name, lhs, float(threshold), False, inputs, True, order, reason)


def _nonneg(**consts):
    for key, val in consts.items():
        if val < 0:
            raise NegativeConstant(f"{key} must be nonnegative, got {val}")


def check_candes_l0(delta_2s: float) -> ConditionVerdict:
    """delta_{2s} < 1: the sparsest solution is unique."""
    _nonneg(delta_2s=delta_2s)
    return _strict(CANDES0, delta_2s, 1.0, {"delta_2s": delta_2s})


def check_candes_l1(delta_s: float, theta_ss: float, theta_2s_s: float) -> ConditionVerdict:
    _nonneg(delta_s=delta_s, theta_ss=theta_ss, theta_2s_s=theta_2s_s)
    lhs = delta_s + theta_ss + theta_2s_s
    return _strict(
        CANDES1,
        lhs,
        1.0,
        {"delta_s": delta_s, "theta_ss": theta_ss, "theta_2s_s": theta_2s_s},
    )


def check_coherence_l1(mu: float, k_sparsity: int) -> ConditionVerdict:
    """Coherence bound ``k < (1 + 1/mu) / 2``.

    A (near) zero coherence makes the bound vacuous: the threshold is
    reported as +inf and the condition holds.
    """
    if mu < 0 or mu > 1 + 1e-12:
        raise ValueError(f"coherence must lie in [0, 1], got {mu}")
    inputs = {"mu": mu, "k": k_sparsity}
    if mu <= ZERO_COHERENCE_TOL:
        return ConditionVerdict(
            COHERENCE, float(k_sparsity), math.inf, True, inputs, reason="zero coherence"
        )
    return _strict(COHERENCE, k_sparsity, 0.5 * (1.0 + 1.0 / mu), inputs)


def check_vaswani_l0(delta_k_plus_2u: float) -> ConditionVerdict:
    _nonneg(delta_k_plus_2u=delta_k_plus_2u)
    return _strict(VASWANI0, delta_k_plus_2u, 1.0, {"delta_k_plus_2u": delta_k_plus_2u})


class Degenerate:
    """Marker returned by :func:`rho_k` when its outer denominator is <= 0."""

    def __init__(self, denominator):
        self.denominator = denominator

    def __repr__(self):
        return f"Degenerate(denominator={self.denominator!r})"

    def __bool__(self):
        return False


def rho_k(theta_stilde_s, theta_stilde_k, theta_s_k, delta_k, delta_s):
    """rho_k(s, s~) = (theta_{s~,s} + theta_{s~,k} theta_{s,k} / (1 - delta_k))
    / (1 - delta_s - theta_{s,k}^2 / (1 - delta_k)).

    Returns a :class:`Degenerate` marker instead of a float when the outer
    denominator is at most 1e-12.
    """
    if delta_k >= 1:
        raise DeltaKTooLarge(f"rho_k needs delta_k < 1, got {delta_k}")
    inner = 1.0 - delta_k
    denom = 1.0 - delta_s - theta_s_k * theta_s_k / inner
    if denom <= DEGENERATE_TOL:
        return Degenerate(denom)
    return (theta_stilde_s + theta_stilde_k * theta_s_k / inner) / denom


VASWANI1_KEYS = (
    "delta_k_plus_u",
    "delta_2u",
    "delta_k",
    "delta_u",
    "theta_k_2u",
    "theta_u_2u",
    "theta_u_k",
    "theta_u_u",
)


def check_vaswani_l1(constants: dict) -> ConditionVerdict:
    """Three comparisons, all required:

    * ``delta_{k+u} < 1``
    * ``delta_{2u} + delta_k + theta_{k,2u}^2 < 1``
    * ``rho_k(2u, u) + rho_k(u, u) < 1``

    `constants` must hold every key in :data:`VASWANI1_KEYS`. The theta
    constants are symmetric in their orders, so ``theta_k_2u`` also serves
    as ``theta_{2u,k}``. The reported lhs is the rho sum; the individual
    parts are kept in ``inputs``.
    """
    missing = [key for key in VASWANI1_KEYS if key not in constants]
    if missing:
        raise MissingConstant(f"missing constants: {', '.join(missing)}")
    c = {key: float(constants[key]) for key in VASWANI1_KEYS}
    _nonneg(**c)
    inputs = dict(c)
    first = c["delta_k_plus_u"]
    second = c["delta_2u"] + c["delta_k"] + c["theta_k_2u"] ** 2
    inputs["first_lhs"] = first
    inputs["second_lhs"] = second
    if c["delta_k"] >= 1:
        return _degenerate(VASWANI1, 1.0, inputs, "delta_k >= 1, rho_k undefined")
    # rho_k(2u, u): s = 2u, s~ = u
    rho_a = rho_k(c["theta_u_2u"], c["theta_u_k"], c["theta_k_2u"], c["delta_k"], c["delta_2u"])
    # rho_k(u, u)
    rho_b = rho_k(c["theta_u_u"], c["theta_u_k"], c["theta_u_k"], c["delta_k"], c["delta_u"])
    if isinstance(rho_a, Degenerate) or isinstance(rho_b, Degenerate):
        return _degenerate(VASWANI1, 1.0, inputs, "rho_k denominator <= 0")
    rho_sum = rho_a + rho_b
    inputs["rho_2u_u"] = rho_a
    inputs["rho_u_u"] = rho_b
    holds = first < 1.0 and second < 1.0 and rho_sum < 1.0
    return ConditionVerdict(VASWANI1, rho_sum, 1.0, holds, inputs)


def check_vaswani_corollary(delta_k_plus_2u: float, k: int, u: int) -> ConditionVerdict:
    _nonneg(delta_k_plus_2u=delta_k_plus_2u)
    inputs = {"delta_k_plus_2u": delta_k_plus_2u, "k": k, "u": u}
    verdict = _strict(VASWANI_COR, delta_k_plus_2u, 0.2, inputs)
    if u > k:
        return ConditionVerdict(
            VASWANI_COR, verdict.lhs, 0.2, False, inputs, reason="u > k"
        )
    return verdict


def ceil_weight(w: float, t: int) -> int:
    """ceil(w * t), ignoring float noise below 1e-9 (0.3 * 10 is 3, not 4)."""
    return max(0, math.ceil(w * t - 1e-9))


def weighted_l0_order(k: int, u: int, t: int, w: float) -> int:
    """RIC order k + 2u + ceil(w t) required by the weighted 0-norm condition."""
    if t > k:
        raise BadDecomposition(f"t={t} cannot exceed k={k}")
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {w}")
    return k + 2 * u + ceil_weight(w, t)


def check_weighted_l0(delta_at_order: float, k: int, u: int, t: int, w: float) -> ConditionVerdict:
    """delta_{k + 2u + ceil(w t)} < 1.

    The caller supplies delta at the order returned by
    :func:`weighted_l0_order`; the verdict records that order.
    """
    order = weighted_l0_order(k, u, t, w)
    _nonneg(delta_at_order=delta_at_order)
    inputs = {"delta": delta_at_order, "k": k, "u": u, "t": t, "w": w, "order": order}
    return _strict(WEIGHTED0, delta_at_order, 1.0, inputs, order=order)


def weight_factor(k: int, u: int, w: float) -> float:
    """sqrt((k w^2 + u) / (k + u))"""
    if k + u == 0:
        raise EmptySupportUnion("k + u must be at least 1")
    return math.sqrt((k * w * w + u) / (k + u))


def check_weighted_l1(
    delta_ku: float, theta_ku: float, theta_ku_2ku: float, k: int, u: int, w: float
) -> ConditionVerdict:
    """sqrt((k w^2 + u)/(k + u)) theta_{k+u} + delta_{k+u} + theta_{k+u,2(k+u)} < 1."""
    if not 0.0 <= w <= 1.0:
        raise ValueError(f"weight must lie in [0, 1], got {w}")
    _nonneg(delta_ku=delta_ku, theta_ku=theta_ku, theta_ku_2ku=theta_ku_2ku)
    factor = weight_factor(k, u, w)
    lhs = factor * theta_ku + delta_ku + theta_ku_2ku
    inputs = {
        "delta_ku": delta_ku,
        "theta_ku": theta_ku,
        "theta_ku_2ku": theta_ku_2ku,
        "k": k,
        "u": u,
        "w": w,
        "factor": factor,
    }
    return _strict(WEIGHTED1, lhs, 1.0, inputs, order=k + u)


def check_weighted_l1_ric_only(delta_3ku: float, k: int, u: int) -> ConditionVerdict:
    """delta_{3(k+u)} < sqrt(2)/(1 + 2 sqrt(2)), valid when u <= k (w = 0 case)."""
    _nonneg(delta_3ku=delta_3ku)
    inputs = {"delta_3ku": delta_3ku, "k": k, "u": u}
    order = 3 * (k + u)
    if u > k:
        return ConditionVerdict(
            WEIGHTED1_RIC, float(delta_3ku), RIC_ONLY_THRESHOLD, False, inputs,
            order=order, reason="u > k",
        )
    return _strict(WEIGHTED1_RIC, delta_3ku, RIC_ONLY_THRESHOLD, inputs, order=order)
