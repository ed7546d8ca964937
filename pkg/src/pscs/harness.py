"""Seeded instance generation and end-to-end theorem-validation runs.

Random numbers come from numpy's PCG64 bit generator seeded through
``numpy.random.SeedSequence``. Matrices for trial ``i`` of a run with seed
``s`` use the entropy ``(s, i)``; supports and planted values use
``(s, i, 1)``. Each trial can therefore be reproduced on its own.
"""
from __future__ import annotations

import csv
import dataclasses
import io
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import conditions as cond
from .core import (
    SensingMatrix,
    SupportDecomposition,
    WeightedNormParams,
    as_matrix,
    coherence,
    decompose_support,
    support,
)
from .errors import CapExceeded, InfeasibleSizes, MalformedFile, RankDeficient
from .fileio import parse_config
from .ric import DEFAULT_CAP, delta_exact, theta_exact
from .solvers import Uniqueness, build_certificate, solve_weighted_l0, solve_weighted_l1

CSV_HEADER = (
    "trial",
    "w",
    "cond_name",
    "lhs",
    "threshold",
    "holds",
    "l0_recovered",
    "l0_unique",
    "l1_recovered",
    "cert_strict",
    "violation",
)

L0_VALUE_TOL = 1e-8
L1_VALUE_TOL = 1e-6


def gen_matrix(m: int, n: int, seed) -> SensingMatrix:
    """Gaussian m x n matrix with unit-norm columns (PCG64 via SeedSequence)."""
    if m < 1 or n < 1:
        raise ValueError(f"need m, n >= 1, got {m}, {n}")
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((m, n))
    a /= np.linalg.norm(a, axis=0)
    return SensingMatrix(a)


@dataclass(frozen=True)
class ExperimentConfig:
    m: int
    n: int
    k: int
    t: int
    u: int
    w_grid: tuple = (0.0, 0.25, 0.5, 0.75, 1.0)
    trials: int = 25
    seed: int = 0
    ensemble: str = "gaussian-unit-columns"
    value_range: tuple = (0.5, 2.0)
    cap: int = DEFAULT_CAP

    def __post_init__(self):
        object.__setattr__(self, "w_grid", tuple(float(w) for w in self.w_grid))
        object.__setattr__(self, "value_range", tuple(float(v) for v in self.value_range))
        self.validate()

    def validate(self):
        if self.m < 1 or self.n < 1:
            raise InfeasibleSizes(f"m and n must be positive, got {self.m}, {self.n}")
        if min(self.k, self.t, self.u) < 0:
            raise InfeasibleSizes("k, t, u must be nonnegative")
        if self.t > self.k:
            raise InfeasibleSizes(f"t={self.t} exceeds k={self.k}")
        if self.k > self.n or self.u > self.n - self.k:
            raise InfeasibleSizes(f"k={self.k}, u={self.u} do not fit in n={self.n}")
        if self.trials < 1:
            raise InfeasibleSizes("trials must be >= 1")
        if not self.w_grid or any(not 0.0 <= w <= 1.0 for w in self.w_grid):
            raise InfeasibleSizes(f"w_grid values must lie in [0, 1], got {self.w_grid}")
        lo, hi = self.value_range
        if not 0.0 < lo <= hi:
            raise InfeasibleSizes(f"bad value_range {self.value_range}")
        if self.ensemble != "gaussian-unit-columns":
            raise InfeasibleSizes(f"unknown ensemble {self.ensemble!r}")

    @classmethod
    def from_text(cls, text: str, path=None) -> "ExperimentConfig":
        raw = parse_config(text, path)
        known = {f.name for f in dataclasses.fields(cls)}
        kwargs = {}
        for key, (value, lineno) in raw.items():
            if key not in known:
                raise MalformedFile(f"unknown key {key!r}", lineno, path)
            try:
                if key in ("w_grid", "value_range"):
                    kwargs[key] = tuple(float(v) for v in value.split(",") if v.strip())
                elif key == "ensemble":
                    kwargs[key] = value
                else:
                    kwargs[key] = int(value)
            except ValueError:
                raise MalformedFile(f"bad value for {key}: {value!r}", lineno, path) from None
        missing = [k for k in ("m", "n", "k", "t", "u") if k not in kwargs]
        if missing:
            raise MalformedFile(f"missing keys: {', '.join(missing)}", None, path)
        try:
            return cls(**kwargs)
        except InfeasibleSizes as exc:
            raise MalformedFile(str(exc), None, path) from None

    @classmethod
    def from_file(cls, path) -> "ExperimentConfig":
        return cls.from_text(Path(path).read_text(), path)


@dataclass
class Instance:
    A: SensingMatrix
    x: np.ndarray
    decomp: SupportDecomposition
    y: np.ndarray


def gen_instance(cfg: ExperimentConfig, trial: int) -> Instance:
    """Planted signal on N = Delta1 | Delta with prior support T.

    T is uniform of size k, Delta1 uniform inside T (size t), Delta uniform
    outside T (size u). Nonzeros have magnitudes uniform in value_range and
    random signs.
    """
    cfg.validate()
    A = gen_matrix(cfg.m, cfg.n, [cfg.seed, trial])
    rng = np.random.default_rng([cfg.seed, trial, 1])
    n = cfg.n
    T = np.sort(rng.choice(n, size=cfg.k, replace=False))
    delta1 = rng.choice(T, size=cfg.t, replace=False) if cfg.t else np.array([], dtype=int)
    outside = np.setdiff1d(np.arange(n), T)
    delta = rng.choice(outside, size=cfg.u, replace=False) if cfg.u else np.array([], dtype=int)
    N = np.sort(np.concatenate([delta1, delta]).astype(int))
    x = np.zeros(n)
    lo, hi = cfg.value_range
    mags = rng.uniform(lo, hi, size=N.size)
    signs = rng.choice([-1.0, 1.0], size=N.size)
    x[N] = mags * signs
    decomp = decompose_support(N.tolist(), T.tolist(), n)
    return Instance(A, x, decomp, A.entries @ x)


class RicCache:
    """Memoized exact constants for one matrix.

    Conventions: order 0 gives 0 (no nonzero vectors qualify). With
    ``clamp=True`` a delta order above n is clamped to n, since every
    support of size <= k is then a subset of [n]; this is what the 0-norm
    arguments need. Otherwise such an order, and any theta pair with
    s + s~ > n, is undefined and returns None.
    """

    def __init__(self, A, cap=DEFAULT_CAP):
        self.A = as_matrix(A)
        self.cap = cap
        self._delta = {}
        self._theta = {}
        self._mu = None

    def delta(self, k: int, clamp: bool = False):
        if k <= 0:
            return 0.0
        if k > self.A.n:
            if not clamp:
                return None
            k = self.A.n
        if k not in self._delta:
            self._delta[k] = delta_exact(self.A, k, cap=self.cap).value
        return self._delta[k]

    def theta(self, s: int, s_tilde: int):
        if s <= 0 or s_tilde <= 0:
            return 0.0
        if s + s_tilde > self.A.n:
            return None
        key = (min(s, s_tilde), max(s, s_tilde))
        if key not in self._theta:
            self._theta[key] = theta_exact(self.A, *key, cap=self.cap).value
        return self._theta[key]

    def coherence(self) -> float:
        if self._mu is None:
            self._mu = coherence(self.A)
        return self._mu

    def table(self) -> dict:
        out = {f"delta_{k}": v for k, v in sorted(self._delta.items())}
        out.update({f"theta_{a},{b}": v for (a, b), v in sorted(self._theta.items())})
        if self._mu is not None:
            out["mu"] = self._mu
        return out


def _undefined(name, threshold, order, reason):
    return cond.ConditionVerdict(
        name, math.nan, threshold, False, {}, degenerate=True, order=order, reason=reason
    )


def _with_order(verdict, order):
    return dataclasses.replace(verdict, order=order)


def evaluate_conditions(decomp: SupportDecomposition, w: float, cache: RicCache, which=None) -> list:
    """Evaluate the named conditions (default: all) with exact constants.

    Raises CapExceeded if some required constant cannot be enumerated.
    """
    names = cond.CONDITION_NAMES if which is None else tuple(which)
    s, k, t, u, _ = decomp.sizes()
    out = []
    for name in names:
        if name == cond.CANDES0:
            v = _with_order(cond.check_candes_l0(cache.delta(2 * s, clamp=True)), 2 * s)
        elif name == cond.CANDES1:
            th_ss, th_2s = cache.theta(s, s), cache.theta(2 * s, s)
            if s == 0 or th_ss is None or th_2s is None:
                v = _undefined(name, 1.0, s, "theta order (2s, s) exceeds n")
            else:
                v = _with_order(cond.check_candes_l1(cache.delta(s), th_ss, th_2s), s)
        elif name == cond.COHERENCE:
            v = cond.check_coherence_l1(cache.coherence(), s)
        elif name == cond.VASWANI0:
            v = _with_order(cond.check_vaswani_l0(cache.delta(k + 2 * u, clamp=True)), k + 2 * u)
        elif name == cond.VASWANI1:
            consts = {
                "delta_k_plus_u": cache.delta(k + u),
                "delta_2u": cache.delta(2 * u),
                "delta_k": cache.delta(k),
                "delta_u": cache.delta(u),
                "theta_k_2u": cache.theta(k, 2 * u),
                "theta_u_2u": cache.theta(u, 2 * u),
                "theta_u_k": cache.theta(u, k),
                "theta_u_u": cache.theta(u, u),
            }
            if any(val is None for val in consts.values()):
                v = _undefined(name, 1.0, k + u, "theta order exceeds n")
            else:
                v = _with_order(cond.check_vaswani_l1(consts), k + u)
        elif name == cond.VASWANI_COR:
            d = cache.delta(k + 2 * u)
            if d is None:
                v = _undefined(name, 0.2, k + 2 * u, "order k + 2u exceeds n")
            else:
                v = _with_order(cond.check_vaswani_corollary(d, k, u), k + 2 * u)
        elif name == cond.WEIGHTED0:
            order = cond.weighted_l0_order(k, u, t, w)
            v = cond.check_weighted_l0(cache.delta(order, clamp=True), k, u, t, w)
        elif name == cond.WEIGHTED1:
            ku = k + u
            th, th2 = cache.theta(ku, ku), cache.theta(ku, 2 * ku)
            if ku == 0:
                v = _undefined(name, 1.0, 0, "k + u = 0")
            elif th is None or th2 is None:
                v = _undefined(name, 1.0, ku, "theta order (k+u, 2(k+u)) exceeds n")
            else:
                v = cond.check_weighted_l1(cache.delta(ku), th, th2, k, u, w)
        elif name == cond.WEIGHTED1_RIC:
            d = cache.delta(3 * (k + u))
            if d is None:
                v = _undefined(name, cond.RIC_ONLY_THRESHOLD, 3 * (k + u), "order 3(k+u) exceeds n")
            else:
                v = cond.check_weighted_l1_ric_only(d, k, u)
        else:
            raise ValueError(f"unknown condition {name!r}")
        out.append(v)
    return out


# which recovery each condition guarantees, and at which weights it applies
_L0_GUARANTEE = {cond.CANDES0: 1.0, cond.VASWANI0: 0.0, cond.WEIGHTED0: None}
_L1_GUARANTEE = {
    cond.CANDES1: 1.0,
    cond.COHERENCE: 1.0,
    cond.VASWANI1: 0.0,
    cond.VASWANI_COR: 0.0,
    cond.WEIGHTED1: None,
    cond.WEIGHTED1_RIC: 0.0,
}


@dataclass
class TrialRecord:
    trial_index: int
    w: float
    verdicts: list
    constants: dict
    l0_unique: bool
    l0_recovered: bool
    l1_recovered: bool
    l1_cert_strict: bool
    row_violations: dict = field(default_factory=dict)

    @property
    def violation(self) -> bool:
        return any(self.row_violations.values())

    def verdict(self, name):
        for v in self.verdicts:
            if v.name == name:
                return v
        raise KeyError(name)


def _row_violation(verdict, w, rec):
    if not verdict.holds:
        return False
    if verdict.name in _L0_GUARANTEE:
        applies_at = _L0_GUARANTEE[verdict.name]
        if applies_at is not None and w != applies_at:
            return False
        return not (rec.l0_unique and rec.l0_recovered)
    applies_at = _L1_GUARANTEE[verdict.name]
    if applies_at is not None and w != applies_at:
        return False
    if verdict.name == cond.WEIGHTED1:
        return not (rec.l1_recovered and rec.l1_cert_strict)
    return not rec.l1_recovered


def l0_recovered(result, x) -> bool:
    want = support(x)
    for cand in result.minimizers:
        if support(cand) == want and np.max(np.abs(cand - x)) <= L0_VALUE_TOL:
            return True
    return False


def run_trial(cfg: ExperimentConfig, trial: int) -> list:
    """TrialRecords for every w in the grid; raises CapExceeded."""
    inst = gen_instance(cfg, trial)
    cache = RicCache(inst.A, cap=cfg.cap)
    records = []
    for w in cfg.w_grid:
        verdicts = evaluate_conditions(inst.decomp, w, cache)
        params = WeightedNormParams(inst.decomp.T, w, cfg.n)
        r0 = solve_weighted_l0(inst.A, inst.y, params)
        r1 = solve_weighted_l1(inst.A, inst.y, params)
        try:
            strict = build_certificate(inst.A, inst.decomp, inst.x, w).strict
        except RankDeficient:
            strict = False
        rec = TrialRecord(
            trial_index=trial,
            w=w,
            verdicts=verdicts,
            constants=cache.table(),
            l0_unique=r0.unique == Uniqueness.YES,
            l0_recovered=l0_recovered(r0, inst.x),
            l1_recovered=bool(np.max(np.abs(r1.x - inst.x)) <= L1_VALUE_TOL),
            l1_cert_strict=strict,
        )
        rec.row_violations = {v.name: _row_violation(v, w, rec) for v in verdicts}
        records.append(rec)
    return records


def _run_trial_safe(args):
    cfg, trial = args
    try:
        return trial, run_trial(cfg, trial), None
    except CapExceeded as exc:
        return trial, [], exc


@dataclass
class ExperimentResult:
    records: list
    skipped: list
    summary: dict


def run_experiment(cfg: ExperimentConfig, workers: int = 1) -> ExperimentResult:
    """Run every trial; the output depends on `cfg` only, not on `workers`."""
    jobs = [(cfg, i) for i in range(cfg.trials)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(_run_trial_safe, jobs))
    else:
        outcomes = [_run_trial_safe(job) for job in jobs]
    outcomes.sort(key=lambda o: o[0])
    records = [r for _, recs, _ in outcomes for r in recs]
    skipped = [(trial, exc.order) for trial, _, exc in outcomes if exc is not None]
    return ExperimentResult(records, skipped, summarize(records, skipped, cfg))


def summarize(records, skipped, cfg) -> dict:
    summary = {
        "trials": cfg.trials,
        "skipped": len(skipped),
        "records": len(records),
        "violations": sum(r.violation for r in records),
        "l0_recovery_rate": _rate(r.l0_recovered and r.l0_unique for r in records),
        "l1_recovery_rate": _rate(r.l1_recovered for r in records),
        "holds": {},
    }
    for name in cond.CONDITION_NAMES:
        held = [r for r in records if r.verdict(name).holds]
        summary["holds"][name] = {
            "count": len(held),
            "rate": len(held) / len(records) if records else 0.0,
            "violations": sum(r.row_violations[name] for r in held),
        }
    return summary


def _rate(flags):
    flags = list(flags)
    return sum(flags) / len(flags) if flags else 0.0


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return format(float(v), ".17g")


def format_csv(records) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for rec in records:
        for v in rec.verdicts:
            writer.writerow(
                [
                    _fmt(rec.trial_index),
                    _fmt(rec.w),
                    v.name,
                    _fmt(v.lhs),
                    _fmt(v.threshold),
                    _fmt(v.holds),
                    _fmt(rec.l0_recovered),
                    _fmt(rec.l0_unique),
                    _fmt(rec.l1_recovered),
                    _fmt(rec.l1_cert_strict),
                    _fmt(rec.row_violations[v.name]),
                ]
            )
    return buf.getvalue()


def write_csv(records, path):
    Path(path).write_text(format_csv(records))


def read_csv(path) -> list:
    """Rows of a results CSV as dicts; checks the header."""
    text = Path(path).read_text()
    reader = csv.reader(io.StringIO(text))
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedFile("empty results file", 1, path) from None
    if tuple(header) != CSV_HEADER:
        raise MalformedFile(f"unexpected header {header}", 1, path)
    rows = []
    for lineno, row in enumerate(reader, start=2):
        if len(row) != len(CSV_HEADER):
            raise MalformedFile(f"expected {len(CSV_HEADER)} fields, got {len(row)}", lineno, path)
        rows.append(dict(zip(CSV_HEADER, row)))
    return rows
