"""Exit criteria. Each test logs one PASS/FAIL line, collected in the
terminal summary under "acceptance criteria"."""
import itertools
import math
import subprocess
import sys
import time

import numpy as np
import pytest

from oracles import l0_bruteforce, l1_vertex_bruteforce
from pscs import conditions as cond
from pscs.core import WeightedNormParams, coherence, weighted_norm
from pscs.harness import ExperimentConfig, gen_matrix, run_experiment
from pscs.ric import delta_exact, theta_exact
from pscs.solvers import solve_weighted_l0, solve_weighted_l1

ACCEPTANCE_CFG = ExperimentConfig(
    m=8, n=10, k=2, t=2, u=1, w_grid=(0.0, 0.25, 0.5, 0.75, 1.0), trials=25, seed=1
)
# larger m so the sufficient conditions actually hold; reported alongside
SUPPLEMENT_CFG = ExperimentConfig(
    m=300, n=10, k=2, t=2, u=1, w_grid=(0.0, 0.25, 0.5, 0.75, 1.0), trials=25, seed=1
)


def report(log, number, title, ok, detail):
    line = f"[{'PASS' if ok else 'FAIL'}] {number}. {title}: {detail}"
    log.append(line)
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def acceptance_run():
    start = time.perf_counter()
    res = run_experiment(ACCEPTANCE_CFG)
    return res, time.perf_counter() - start


@pytest.fixture(scope="module")
def supplement_run():
    return run_experiment(SUPPLEMENT_CFG)


def test_1_weighted_l0_theorem(acceptance_run, supplement_run, acceptance_log):
    res, elapsed = acceptance_run
    held = [r for r in res.records if r.verdict(cond.WEIGHTED0).holds]
    good = [r for r in held if r.l0_unique and r.l0_recovered]
    sup = [r for r in supplement_run.records if r.verdict(cond.WEIGHTED0).holds]
    sup_good = [r for r in sup if r.l0_unique and r.l0_recovered]
    ok = len(good) == len(held) and len(sup_good) == len(sup) and elapsed < 60
    report(
        acceptance_log, 1, "weighted-l0 theorem validation", ok,
        f"{len(good)}/{len(held)} qualifying (trial,w) recovered uniquely at m=8 "
        f"(l0 recovery over all {len(res.records)} records: "
        f"{res.summary['l0_recovery_rate']:.3f}); supplement m=300: "
        f"{len(sup_good)}/{len(sup)}; run {elapsed:.1f}s",
    )


def test_2_weighted_l1_theorem(acceptance_run, supplement_run, acceptance_log):
    res, elapsed = acceptance_run
    held = [r for r in res.records if r.verdict(cond.WEIGHTED1).holds]
    good = [r for r in held if r.l1_recovered and r.l1_cert_strict]
    sup = [r for r in supplement_run.records if r.verdict(cond.WEIGHTED1).holds]
    sup_good = [r for r in sup if r.l1_recovered and r.l1_cert_strict]
    ok = len(good) == len(held) and len(sup_good) == len(sup) and elapsed < 120
    report(
        acceptance_log, 2, "weighted-l1 theorem validation", ok,
        f"{len(good)}/{len(held)} qualifying (trial,w) recovered with strict certificate at m=8; "
        f"supplement m=300: {len(sup_good)}/{len(sup)}",
    )


def test_3_theta_below_delta(acceptance_log):
    worst = -math.inf
    checks = 0
    for seed in range(20):
        A = gen_matrix(6, 12, [3, seed])
        deltas = {k: delta_exact(A, k).value for k in range(2, 5)}
        for s, st in itertools.product(range(1, 4), repeat=2):
            if s + st <= 4:
                gap = theta_exact(A, s, st).value - deltas[s + st]
                worst = max(worst, gap)
                checks += 1
    report(
        acceptance_log, 3, "theta_{s,s~} <= delta_{s+s~}", worst <= 1e-10,
        f"{checks} comparisons on 20 random 6x12 matrices, max(theta - delta) = {worst:.3e}",
    )


def test_4_ric_only_constant(acceptance_log):
    thr = cond.check_weighted_l1_ric_only(0.0, 1, 1).threshold
    closed = math.sqrt(2) / (1 + 2 * math.sqrt(2))
    ok = abs(thr - 0.369) < 1e-3 and abs(thr - closed) <= 1e-12
    report(acceptance_log, 4, "RIC-only threshold", ok, f"threshold = {thr!r}, closed form {closed!r}")


def test_5_reduction_identities(acceptance_log):
    rng = np.random.default_rng(55)
    agree = 0
    total = 0
    for _ in range(50):
        t = int(rng.integers(1, 6))
        u = int(rng.integers(0, 5))
        k, s = t, t + u  # e = 0
        d_s, th_s, th_s2s = rng.uniform(0, 0.6, 3)
        d_2s, d_k2u = rng.uniform(0.5, 1.5, 2)
        pairs = [
            (cond.check_weighted_l1(d_s, th_s, th_s2s, k, u, 1.0), cond.check_candes_l1(d_s, th_s, th_s2s)),
            (cond.check_weighted_l0(d_2s, k, u, t, 1.0), cond.check_candes_l0(d_2s)),
            (cond.check_weighted_l0(d_k2u, k, u, t, 0.0), cond.check_vaswani_l0(d_k2u)),
        ]
        assert cond.weighted_l0_order(k, u, t, 1.0) == 2 * s
        for weighted, reference in pairs:
            total += 1
            agree += weighted.holds == reference.holds and weighted.lhs == reference.lhs
    report(acceptance_log, 5, "w=1 / w=0 reductions", agree == total, f"{agree}/{total} verdicts agree")


def test_6_solver_oracles(acceptance_log):
    rng = np.random.default_rng(66)
    worst_l1 = 0.0
    for _ in range(30):
        n = int(rng.integers(4, 9))
        m = int(rng.integers(2, n))
        A = gen_matrix(m, n, int(rng.integers(1 << 31)))
        x = np.zeros(n)
        N = rng.choice(n, size=int(rng.integers(1, m + 1)), replace=False)
        x[N] = rng.uniform(0.5, 2, N.size) * rng.choice([-1, 1], N.size)
        T = tuple(rng.choice(n, size=int(rng.integers(0, n)), replace=False).tolist())
        w = float(rng.choice([0.0, 1.0, rng.uniform()]))
        y = A.entries @ x
        got = solve_weighted_l1(A, y, WeightedNormParams(T, w)).objective
        want, _ = l1_vertex_bruteforce(A.entries, y, T, w)
        worst_l1 = max(worst_l1, abs(got - want))

    l0_match = 0
    for _ in range(30):
        n = int(rng.integers(4, 13))
        m = int(rng.integers(2, n))
        A = gen_matrix(m, n, int(rng.integers(1 << 31)))
        x = np.zeros(n)
        N = rng.choice(n, size=int(rng.integers(1, m + 1)), replace=False)
        x[N] = rng.uniform(0.5, 2, N.size) * rng.choice([-1, 1], N.size)
        T = tuple(rng.choice(n, size=int(rng.integers(0, n)), replace=False).tolist())
        w = float(rng.choice([0.0, 1.0, 0.5, rng.uniform()]))
        y = A.entries @ x
        res = solve_weighted_l0(A, y, WeightedNormParams(T, w))
        best, mins = l0_bruteforce(A.entries, y, T, w)
        # with a continuum of minimizers the listed representatives differ,
        # so compare verdicts and check every returned point is optimal
        unique = len(mins) == 1
        agree = res.objective == best and (res.unique.value == "yes") == unique
        for v in res.minimizers:
            agree &= np.max(np.abs(A.entries @ v - y)) <= 1e-8
            agree &= abs(weighted_norm(v, 0, WeightedNormParams(T, w)) - best) <= 1e-9
        if unique:
            agree &= np.max(np.abs(res.x - mins[0])) <= 1e-8
        l0_match += bool(agree)
    ok = worst_l1 <= 1e-7 and l0_match == 30
    report(
        acceptance_log, 6, "solver oracle equivalence", ok,
        f"l1 max |objective gap| = {worst_l1:.2e} over 30 (n<=8); l0 exact match {l0_match}/30 (n<=12)",
    )


def test_7_coherence_ric_identity(acceptance_log):
    worst2 = worst1 = 0.0
    for seed in range(20):
        A = gen_matrix(5, 10, [7, seed])
        worst2 = max(worst2, abs(delta_exact(A, 2).value - coherence(A)))
        worst1 = max(worst1, abs(delta_exact(A, 1).value))
    ok = worst2 <= 1e-10 and worst1 <= 1e-10
    report(
        acceptance_log, 7, "delta_2 = coherence, delta_1 = 0", ok,
        f"max |delta_2 - mu| = {worst2:.2e}, max |delta_1| = {worst1:.2e} over 20 matrices",
    )


def test_8_cli_determinism(tmp_path, acceptance_log):
    cfg = tmp_path / "cfg.txt"
    cfg.write_text(
        "m = 8\nn = 10\nk = 2\nt = 2\nu = 1\nw_grid = 0, 0.25, 0.5, 0.75, 1\ntrials = 25\nseed = 1\n"
    )
    outs = []
    for name in ("a.csv", "b.csv"):
        proc = subprocess.run(
            [sys.executable, "-m", "pscs", "experiment", "--config", str(cfg), "--out", str(tmp_path / name)],
            capture_output=True, text=True,
        )
        assert proc.returncode == 0, proc.stderr
        outs.append((tmp_path / name).read_bytes())
    ok = outs[0] == outs[1] and len(outs[0]) > 0
    report(acceptance_log, 8, "experiment determinism", ok, f"two runs, {len(outs[0])} bytes each, identical={ok}")
