"""Restricted isometry (delta) and restricted orthogonality (theta) constants.

Exact values enumerate every admissible support in lexicographic order and
reduce with ``max``; because max is associative and commutative, splitting
the enumeration into chunks (optionally across worker threads) gives the
same answer as a single pass. Sampled values take the max over random
supports and are therefore lower bounds on the exact constants.
"""
from __future__ import annotations

import enum
import itertools
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from math import comb

import numpy as np

from .core import as_matrix
from .errors import BadOrder, CapExceeded
from .jacobi import jacobi_eigvalsh

DEFAULT_CAP = 2_000_000
CHUNK = 4096


class Mode(str, enum.Enum):
    EXACT = "exact"
    SAMPLED = "sampled"


@dataclass(frozen=True)
class RicReport:
    """A computed delta_k or theta_{s,s~} value and how it was obtained."""

    name: str
    order: tuple
    value: float
    mode: Mode
    samples_used: int
    subsets_enumerated: int

    def line(self) -> str:
        return f"{self.name} {self.value!r} {self.mode.value} {self.subsets_enumerated}"


def delta_count(n, k):
    return comb(n, k)


def theta_count(n, s, s_tilde):
    return comb(n, s) * comb(n - s, s_tilde)


def _delta_from_grams(G):
    ev = jacobi_eigvalsh(G)
    return np.maximum(ev[:, -1] - 1.0, 1.0 - ev[:, 0])


def _theta_from_blocks(B):
    # spectral norm of B via the smaller of B B' and B' B
    if B.shape[1] <= B.shape[2]:
        M = B @ B.transpose(0, 2, 1)
    else:
        M = B.transpose(0, 2, 1) @ B
    ev = jacobi_eigvalsh(M)
    return np.sqrt(np.maximum(ev[:, -1], 0.0))


def _delta_chunk_max(G, subsets):
    idx = np.asarray(subsets, dtype=np.intp)
    grams = G[idx[:, :, None], idx[:, None, :]]
    return float(_delta_from_grams(grams).max())


def _theta_chunk_max(G, pairs):
    left = np.asarray([p[0] for p in pairs], dtype=np.intp)
    right = np.asarray([p[1] for p in pairs], dtype=np.intp)
    blocks = G[left[:, :, None], right[:, None, :]]
    return float(_theta_from_blocks(blocks).max())


def _chunks(iterable, size):
    it = iter(iterable)
    while True:
        block = list(itertools.islice(it, size))
        if not block:
            return
        yield block


def disjoint_pairs(n, s, s_tilde):
    """All (T, T~) with |T|=s, |T~|=s~ disjoint, in lexicographic order."""
    full = range(n)
    for left in itertools.combinations(full, s):
        rest = [i for i in full if i not in left]
        for right in itertools.combinations(rest, s_tilde):
            yield left, right


def _map_max(fn, G, blocks, workers):
    if workers and workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return max(pool.map(lambda b: fn(G, b), blocks), default=0.0)
    return max((fn(G, b) for b in blocks), default=0.0)


def gram(A):
    A = as_matrix(A)
    return A.entries.T @ A.entries


def _check_delta_order(n, k):
    if k < 1 or k > n:
        raise BadOrder(f"delta order k={k} must satisfy 1 <= k <= n={n}")


def _check_theta_order(n, s, s_tilde):
    if s < 1 or s_tilde < 1 or s + s_tilde > n:
        raise BadOrder(
            f"theta orders ({s}, {s_tilde}) need s, s~ >= 1 and s + s~ <= n={n}"
        )


def delta_exact(A, k: int, cap: int = DEFAULT_CAP, workers: int | None = None) -> RicReport:
    """Exact delta_k = max over |S| = k of the Gram spectrum's distance from 1."""
    A = as_matrix(A)
    _check_delta_order(A.n, k)
    count = delta_count(A.n, k)
    if count > cap:
        raise CapExceeded(count, cap, order=k)
    G = gram(A)
    blocks = _chunks(itertools.combinations(range(A.n), k), CHUNK)
    value = _map_max(_delta_chunk_max, G, blocks, workers)
    return RicReport(f"delta_{k}", (k,), value, Mode.EXACT, 0, count)


def theta_exact(
    A, s: int, s_tilde: int, cap: int = DEFAULT_CAP, workers: int | None = None
) -> RicReport:
    """Exact theta_{s,s~}: max spectral norm of A_T' A_T~ over disjoint T, T~."""
    A = as_matrix(A)
    _check_theta_order(A.n, s, s_tilde)
    count = theta_count(A.n, s, s_tilde)
    if count > cap:
        raise CapExceeded(count, cap, order=(s, s_tilde))
    G = gram(A)
    blocks = _chunks(disjoint_pairs(A.n, s, s_tilde), CHUNK)
    value = _map_max(_theta_chunk_max, G, blocks, workers)
    return RicReport(f"theta_{s},{s_tilde}", (s, s_tilde), value, Mode.EXACT, 0, count)


def _trial_rng(seed, trial):
    return np.random.default_rng([int(seed), int(trial)])


def delta_sampled(A, k: int, trials: int, seed: int) -> RicReport:
    """Lower bound on delta_k from `trials` random supports.

    Trial ``i`` draws its support from a generator seeded with
    ``(seed, i)``, so results do not depend on evaluation order.
    """
    A = as_matrix(A)
    _check_delta_order(A.n, k)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    subsets = np.empty((trials, k), dtype=np.intp)
    for i in range(trials):
        subsets[i] = np.sort(_trial_rng(seed, i).choice(A.n, size=k, replace=False))
    G = gram(A)
    value = max(_delta_chunk_max(G, subsets[j : j + CHUNK]) for j in range(0, trials, CHUNK))
    distinct = len({tuple(r) for r in subsets.tolist()})
    return RicReport(f"delta_{k}", (k,), value, Mode.SAMPLED, trials, distinct)


def theta_sampled(A, s: int, s_tilde: int, trials: int, seed: int) -> RicReport:
    A = as_matrix(A)
    _check_theta_order(A.n, s, s_tilde)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    pairs = []
    for i in range(trials):
        pick = _trial_rng(seed, i).choice(A.n, size=s + s_tilde, replace=False)
        pairs.append((tuple(sorted(pick[:s].tolist())), tuple(sorted(pick[s:].tolist()))))
    G = gram(A)
    value = max(_theta_chunk_max(G, pairs[j : j + CHUNK]) for j in range(0, trials, CHUNK))
    return RicReport(
        f"theta_{s},{s_tilde}", (s, s_tilde), value, Mode.SAMPLED, trials, len(set(pairs))
    )
