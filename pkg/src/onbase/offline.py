"""Offline baselines: identical-basestation optimum, exhaustive search, matchings."""

from __future__ import annotations

import itertools
import math
import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import TooLargeError, UnsupportedShapeError
from .model import Allocation, WeightsLike, as_array

BRUTE_FORCE_LIMIT = 10**7


@dataclass(frozen=True)
class Matching:
    """Set of (user, basestation) edges with no repeated endpoint."""

    edges: tuple
    weight: float

    @classmethod
    def from_edges(cls, edges, W: WeightsLike) -> "Matching":
        w = as_array(W)
        edges = tuple(sorted((int(i), int(j)) for i, j in edges))
        return cls(edges, float(sum(w[i, j] for i, j in edges)))

    def is_valid(self) -> bool:
        users = [i for i, _ in self.edges]
        bss = [j for _, j in self.edges]
        return len(set(users)) == len(users) and len(set(bss)) == len(bss)

    def to_json(self) -> str:
        return json.dumps({"weight": self.weight, "edges": [[i + 1, j + 1] for i, j in self.edges]})


def optimal_identical_offline(w, m: int):
    """Optimum for identical basestations.

    The m-1 heaviest users get a basestation each and the remaining n-m+1
    users share the last one.  ``w`` is the per-user weight vector in any order.
    Returns ``(value, Allocation)``.
    """
    w = np.asarray(w, dtype=float).ravel()
    n = w.size
    if m >= n:
        raise UnsupportedShapeError(f"need m < n, got m={m}, n={n}")
    if np.any(w < 0):
        raise UnsupportedShapeError("weights must be nonnegative")
    # stable sort on -w keeps lower user indices first among ties
    rank = np.argsort(-w, kind="stable")
    top, rest = rank[: m - 1], rank[m - 1 :]
    # same correctly rounded sums as ts_utility, so the two agree bit for bit
    value = math.fsum([*w[top], math.fsum(w[rest]) / (n - m + 1)])
    assign = np.full(n, m - 1, dtype=int)
    assign[top] = np.arange(m - 1)
    return value, Allocation(assign, m)


def _all_assignments(n: int, m: int, start: int, stop: int) -> np.ndarray:
    # rows start..stop-1 of the lexicographic list of all m**n assignment vectors
    idx = np.arange(start, stop, dtype=np.int64)
    digits = np.empty((idx.size, n), dtype=np.int64)
    for pos in range(n - 1, -1, -1):
        digits[:, pos] = idx % m
        idx //= m
    return digits


def brute_force_optimal(W: WeightsLike, chunk: int = 1 << 16):
    """Exact maximizer of the time-sharing utility over all m**n assignments.

    Ties go to the lexicographically smallest assignment vector.
    """
    w = as_array(W)
    n, m = w.shape
    total = m**n
    if total > BRUTE_FORCE_LIMIT:
        raise TooLargeError(f"m**n = {total} exceeds the enumeration limit {BRUTE_FORCE_LIMIT}")
    best_val, best_idx = -1.0, 0
    rows = np.arange(n)
    for start in range(0, total, chunk):
        a = _all_assignments(n, m, start, min(total, start + chunk))
        vals = np.zeros(a.shape[0])
        picked = w[rows, a]  # rate of each user on its assigned basestation
        for j in range(m):
            mask = a == j
            d = mask.sum(axis=1)
            s = np.where(mask, picked, 0.0).sum(axis=1)
            vals += np.divide(s, d, out=np.zeros_like(s), where=d > 0)
        k = int(np.argmax(vals))
        if vals[k] > best_val:
            best_val, best_idx = float(vals[k]), start + k
    assign = _all_assignments(n, m, best_idx, best_idx + 1)[0]
    return best_val, Allocation(assign, m)


def max_weight_matching(W: WeightsLike) -> Matching:
    """Maximum weight matching of the complete user/basestation bipartite graph."""
    w = as_array(W)
    rows, cols = linear_sum_assignment(w, maximize=True)
    return Matching.from_edges(zip(rows, cols), w)


def brute_force_matching(W: WeightsLike) -> Matching:
    """Maximum weight matching by enumerating injections of the smaller side."""
    w = as_array(W)
    n, m = w.shape
    best, best_edges = -1.0, ()
    if m <= n:
        for users in itertools.permutations(range(n), m):
            val = sum(w[u, j] for j, u in enumerate(users))
            if val > best:
                best, best_edges = val, tuple(zip(users, range(m)))
    else:
        for bss in itertools.permutations(range(m), n):
            val = sum(w[i, j] for i, j in enumerate(bss))
            if val > best:
                best, best_edges = val, tuple(zip(range(n), bss))
    return Matching.from_edges(best_edges, w)


def greedy_matching(W: WeightsLike) -> Matching:
    """Heaviest-edge-first maximal matching.

    Edges are scanned by decreasing weight; ties by (user, basestation).
    """
    w = as_array(W)
    n, m = w.shape
    ii, jj = np.divmod(np.arange(n * m), m)
    order = np.lexsort((jj, ii, -w.ravel()))
    used_u = np.zeros(n, dtype=bool)
    used_b = np.zeros(m, dtype=bool)
    edges = []
    for k in order:
        i, j = ii[k], jj[k]
        if not used_u[i] and not used_b[j]:
            used_u[i] = used_b[j] = True
            edges.append((i, j))
            if len(edges) == min(n, m):
                break
    return Matching.from_edges(edges, w)


def exchange_gap(w, subset) -> float:
    """LHS minus RHS of the two-basestation exchange inequality.

    ``w`` is sorted descending; ``subset`` holds indices from 1..d-1 (0-based)
    that join user 0 on its basestation while the rest share the other.  The
    inequality says keeping user 0 alone is never worse, i.e. the gap is >= 0.
    An empty side contributes 0.
    """
    w = np.asarray(w, dtype=float)
    d = w.size
    S = sorted(set(subset))
    k = len(S)
    rest = [i for i in range(1, d) if i not in S]
    lhs = w[0] + (np.sum(w[1:]) / (d - 1) if d > 1 else 0.0)
    rhs = (w[0] + np.sum(w[S])) / (k + 1)
    if rest:
        rhs += np.sum(w[rest]) / len(rest)
    return float(lhs - rhs)
