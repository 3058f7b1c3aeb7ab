"""Online allocation policies and the name registry used by the harness and CLI.

Policies written for identical basestations (the secretary family and the
identical-weight reassignment rules) read a user's weight from the first
entry of its row.
"""

from __future__ import annotations

import heapq
import inspect
import math
import warnings
from typing import Optional

import numpy as np

from .errors import ConfigError
from .model import Decision, Move, OnlineAlgorithm, WeightsLike, as_array, run_online
from .offline import Matching, greedy_matching


class RoundRobin(OnlineAlgorithm):
    """Arrival i (1-based) goes to basestation 1 + (i mod m)."""

    name = "round-robin"

    def arrive(self, i, row):
        return Decision((i + 1) % self.m)


class MaxWeight(OnlineAlgorithm):
    """Each user joins its strongest basestation; ties go to the lowest index."""

    name = "max-weight"

    def arrive(self, i, row):
        return Decision(int(np.argmax(row)))


class LeastLoaded(OnlineAlgorithm):
    """Join the basestation with the fewest users so far (lowest index on ties).

    This is what max-weight association does when basestations are identical
    and ties are broken by load.
    """

    name = "least-loaded"

    def start(self, n, m, rng):
        super().start(n, m, rng)
        self.load = [0] * m

    def arrive(self, i, row):
        j = self.load.index(min(self.load))
        self.load[j] += 1
        return Decision(j)


def _test_users(n: int, r: Optional[int], alpha: float, low: int = 0) -> int:
    if r is not None:
        return int(r)
    return min(max(low, int(alpha * n)), n - 1)


class Secretary(OnlineAlgorithm):
    """Single-stop secretary rule on two basestations.

    The first r users go to basestation 0 and set the threshold T to their
    maximum.  The first later user with weight >= T goes to basestation 1 and
    every other user to basestation 0.  If basestation 1 is still empty when the
    last user arrives, that user goes to basestation 1.
    """

    name = "secretary"

    def __init__(self, r: Optional[int] = None, alpha: float = 1 / math.e):
        self.r_param, self.alpha = r, alpha

    def start(self, n, m, rng):
        super().start(n, m, rng)
        self.r = _test_users(n, self.r_param, self.alpha)
        if not 0 <= self.r < n:
            raise ConfigError(f"need 0 <= r < n, got r={self.r}, n={n}")
        self.T = -math.inf
        self.done = False

    def arrive(self, i, row):
        x = row[0]
        if i < self.r:
            self.T = max(self.T, x)
            return Decision(0)
        if not self.done and (x >= self.T or i == self.n - 1):
            self.done = True
            return Decision(1)
        return Decision(0)


class SecretaryModified(OnlineAlgorithm):
    """Repeated-selection variant: every running strict maximum after the r
    test users goes to basestation 1, all other users to basestation 0.
    There is no fallback, so basestation 1 may stay empty."""

    name = "secretary-modified"

    def __init__(self, r: Optional[int] = None, alpha: float = 0.22):
        self.r_param, self.alpha = r, alpha

    def start(self, n, m, rng):
        super().start(n, m, rng)
        self.r = _test_users(n, self.r_param, self.alpha)
        if not 0 <= self.r < n:
            raise ConfigError(f"need 0 <= r < n, got r={self.r}, n={n}")
        self.T = -math.inf

    def arrive(self, i, row):
        x = row[0]
        if i >= self.r and x > self.T:
            self.T = x
            return Decision(1)
        self.T = max(self.T, x)
        return Decision(0)


class KSecretary(OnlineAlgorithm):
    """Threshold rule for m basestations.

    After r test users (all on basestation 0), a user is selected when its
    weight beats T, the (m-1)-th best weight seen so far.  Selected users are
    dealt round-robin over basestations 1..m-1; everybody else goes to 0.
    """

    name = "k-secretary"

    def __init__(self, r: Optional[int] = None, alpha: float = 0.22):
        self.r_param, self.alpha = r, alpha

    def start(self, n, m, rng):
        super().start(n, m, rng)
        if m < 2:
            raise ConfigError("k-secretary needs m >= 2")
        self.k = m - 1
        self.r = _test_users(n, self.r_param, self.alpha, low=self.k)
        if self.r < self.k:
            raise ConfigError(f"need r >= m-1 = {self.k}, got r={self.r}")
        self.top: list = []  # min-heap of the k best weights seen
        self.next_bs = 1

    @property
    def T(self) -> float:
        return self.top[0] if len(self.top) == self.k else -math.inf

    def arrive(self, i, row):
        x = row[0]
        if i >= self.r and x > self.T:
            heapq.heappush(self.top, x)
            if len(self.top) > self.k:
                heapq.heappop(self.top)
            j = self.next_bs
            self.next_bs = 1 if j == self.m - 1 else j + 1
            return Decision(j)
        if len(self.top) < self.k:
            heapq.heappush(self.top, x)
        elif x > self.top[0]:
            heapq.heapreplace(self.top, x)
        return Decision(0)


class SampleAndPrice(OnlineAlgorithm):
    """Online matching by sampling then pricing.

    k ~ Binomial(n, p) users are observed without being matched.  A greedy
    matching on that sample fixes a price per basestation (0 if unmatched).
    Each later user takes its heaviest edge to a still-free basestation whose
    weight reaches that basestation's price, or stays unmatched.
    """

    name = "sample-and-price"
    total = False

    def __init__(self, p: float = 0.5):
        if not 0.0 <= p <= 1.0:
            raise ConfigError(f"p must be in [0, 1], got {p}")
        self.p = p

    def start(self, n, m, rng):
        super().start(n, m, rng)
        self.k = int(rng.binomial(n, self.p))
        self.sample: list = []
        self.price = np.zeros(m) if self.k == 0 else None
        self.free = np.ones(m, dtype=bool)

    def arrive(self, i, row):
        if i < self.k:
            self.sample.append(row)
            if i == self.k - 1:
                self.price = np.zeros(self.m)
                for u, j in greedy_matching(np.array(self.sample)).edges:
                    self.price[j] = self.sample[u][j]
            return Decision(None)
        ok = self.free & (row >= self.price)
        if not ok.any():
            return Decision(None)
        j = int(np.argmax(np.where(ok, row, -np.inf)))
        self.free[j] = False
        return Decision(j)


class GreedyReassign(OnlineAlgorithm):
    """Online greedy matching with one eviction per arrival.

    Among basestations where the new user's weight beats the weight currently
    held there, it takes the heaviest (lowest index on ties) and the previous
    holder is deleted from the matching.
    """

    name = "greedy-reassign"
    total = False
    reassigns = True

    def start(self, n, m, rng):
        super().start(n, m, rng)
        self.held = np.full(m, -np.inf)
        self.holder = [-1] * m

    def arrive(self, i, row):
        better = row > self.held
        if not better.any():
            return Decision(None)
        j = int(np.argmax(np.where(better, row, -np.inf)))
        old = self.holder[j]
        self.held[j] = row[j]
        self.holder[j] = i
        return Decision(j, Move(old, j, None) if old >= 0 else None)


class _Hidden(OnlineAlgorithm):
    """Hide a uniformly random basestation j0 and match online on the others.

    Matched users take their matched basestation; everyone else, including
    users evicted by the inner matcher, goes to j0.
    """

    def __init__(self, hidden: Optional[int] = None):
        self.hidden = hidden

    def _inner(self) -> OnlineAlgorithm:
        raise NotImplementedError

    def start(self, n, m, rng):
        super().start(n, m, rng)
        if m < 2:
            raise ConfigError(f"{self.name} needs m >= 2")
        self.j0 = int(rng.integers(m)) if self.hidden is None else int(self.hidden)
        self.cols = np.array([j for j in range(m) if j != self.j0])
        self.inner = self._inner()
        self.inner.start(n, m - 1, rng)

    def arrive(self, i, row):
        bs, move = self.inner.arrive(i, row[self.cols])
        if move is not None:
            move = Move(move.user, int(self.cols[move.src]), self.j0)
        return Decision(self.j0 if bs is None else int(self.cols[bs]), move)


class HideAndSeek(_Hidden):
    name = "hide-and-seek"

    def __init__(self, p: float = 0.5, hidden: Optional[int] = None):
        super().__init__(hidden)
        self.p = p

    def _inner(self):
        return SampleAndPrice(self.p)


class HideAndSeekReassign(_Hidden):
    name = "hide-and-seek-reassign"
    reassigns = True

    def _inner(self):
        return GreedyReassign()


class ReassignIdentical(OnlineAlgorithm):
    """Keep the best m-1 users seen so far alone on their own basestations.

    While some basestation is empty the new user takes it.  After that one
    basestation (the one holding the weakest user at that moment) becomes the
    shared one.  A new user stronger than the weakest lone user takes that
    user's basestation and the displaced user moves to the shared one;
    otherwise the new user joins the shared basestation.
    """

    name = "reassign-identical"
    reassigns = True

    def start(self, n, m, rng):
        super().start(n, m, rng)
        self.weight: list = []
        self.occupant = [-1] * m
        self.shared: Optional[int] = None
        self.warned = False

    def arrive(self, i, row):
        x = row[0]
        if not self.warned and np.any(row != x):
            warnings.warn(f"{self.name}: non-identical row at arrival {i}; using its first entry", stacklevel=2)
            self.warned = True
        self.weight.append(x)
        if self.shared is None:
            if -1 in self.occupant:
                j = self.occupant.index(-1)
                self.occupant[j] = i
                return Decision(j)
            self.shared = min(range(self.m), key=lambda j: self.weight[self.occupant[j]])
        solos = [j for j in range(self.m) if j != self.shared]
        if solos:
            j = min(solos, key=lambda j: self.weight[self.occupant[j]])
            old = self.occupant[j]
            if x > self.weight[old]:
                self.occupant[j] = i
                return Decision(j, Move(old, j, self.shared))
        return Decision(self.shared)


class LastUserReassign(OnlineAlgorithm):
    """Greedy utility maximizer that may move only the previous arrival.

    On each arrival it tries every placement of the new user, alone or
    combined with moving arrival i-1 to another basestation, and keeps the one
    with the largest current utility.  Placements without a move are preferred
    on ties, then lower indices.
    """

    name = "last-user-reassign"
    reassigns = True
    comparison_based = False

    def start(self, n, m, rng):
        super().start(n, m, rng)
        self.sums = [0.0] * m
        self.deg = [0] * m
        self.prev_row = None
        self.prev_bs = -1

    def _value(self, changes) -> float:
        # changes: {bs: (delta_sum, delta_deg)}
        total = 0.0
        for j in range(self.m):
            s, d = self.sums[j], self.deg[j]
            if j in changes:
                s += changes[j][0]
                d += changes[j][1]
            if d:
                total += s / d
        return total

    def arrive(self, i, row):
        best_val, best = -math.inf, None
        for b in range(self.m):
            val = self._value({b: (row[b], 1)})
            if val > best_val * (1 + 1e-12) or best is None:
                best_val, best = val, (b, None)
        if self.prev_row is not None:
            a = self.prev_bs
            for c in range(self.m):
                if c == a:
                    continue
                for b in range(self.m):
                    ch: dict = {}
                    for j, ds, dd in ((a, -self.prev_row[a], -1), (c, self.prev_row[c], 1), (b, row[b], 1)):
                        s0, d0 = ch.get(j, (0.0, 0))
                        ch[j] = (s0 + ds, d0 + dd)
                    val = self._value(ch)
                    if val > best_val * (1 + 1e-12) + 1e-300:
                        best_val, best = val, (b, c)
        b, c = best
        move = None
        if c is not None:
            a = self.prev_bs
            self.sums[a] -= self.prev_row[a]
            self.deg[a] -= 1
            self.sums[c] += self.prev_row[c]
            self.deg[c] += 1
            move = Move(i - 1, a, c)
        self.sums[b] += row[b]
        self.deg[b] += 1
        self.prev_row, self.prev_bs = row, b
        return Decision(b, move)


REGISTRY = {
    cls.name: cls
    for cls in (
        RoundRobin,
        MaxWeight,
        LeastLoaded,
        Secretary,
        SecretaryModified,
        KSecretary,
        SampleAndPrice,
        HideAndSeek,
        GreedyReassign,
        HideAndSeekReassign,
        ReassignIdentical,
        LastUserReassign,
    )
}


def make_algorithm(name: str, **params) -> OnlineAlgorithm:
    """Build a registered policy; parameters it does not take are ignored."""
    try:
        cls = REGISTRY[name]
    except KeyError:
        raise ConfigError(f"unknown algorithm {name!r}; valid names: {', '.join(sorted(REGISTRY))}") from None
    accepted = inspect.signature(cls.__init__).parameters
    kwargs = {k: v for k, v in params.items() if k in accepted and v is not None}
    return cls(**kwargs)


def _matching_from_run(alg: OnlineAlgorithm, W: WeightsLike, seed) -> Matching:
    w = as_array(W)
    alloc, _ = run_online(alg, w, seed)
    return Matching.from_edges([(i, j) for i, j in enumerate(alloc.assign) if j >= 0], w)


def sample_and_price(W: WeightsLike, p: float = 0.5, seed=None) -> Matching:
    """Run sample-and-price over the rows of W in order and return its matching."""
    return _matching_from_run(SampleAndPrice(p), W, seed)


def online_greedy_reassign(W: WeightsLike) -> Matching:
    """Run the one-eviction online greedy matcher over the rows of W in order."""
    return _matching_from_run(GreedyReassign(), W, None)
