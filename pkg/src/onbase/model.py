"""Problem data types, the time-sharing utility and the online execution loop.

Users are rows of the weight matrix and basestations are columns.  Everything
is 0-based internally; serialized output (CSV/JSON) is 1-based where indices
appear.
"""

from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, NamedTuple, Optional, Sequence, Union

import numpy as np

from .errors import ContractViolation, InvalidAllocationError, UnsupportedShapeError


@dataclass(frozen=True)
class WeightMatrix:
    """n x m matrix of nonnegative rates; row i holds user i's rate to each basestation."""

    w: np.ndarray

    def __post_init__(self):
        w = np.array(self.w, dtype=float)
        if w.ndim != 2 or w.shape[0] < 1 or w.shape[1] < 1:
            raise UnsupportedShapeError(f"weight matrix must be 2-D and nonempty, got shape {w.shape}")
        if not np.all(np.isfinite(w)) or np.any(w < 0):
            raise UnsupportedShapeError("weights must be finite and nonnegative")
        w.flags.writeable = False
        object.__setattr__(self, "w", w)

    @property
    def n(self) -> int:
        return self.w.shape[0]

    @property
    def m(self) -> int:
        return self.w.shape[1]

    @classmethod
    def identical(cls, weights: Sequence[float], m: int) -> "WeightMatrix":
        """Identical-basestation matrix: every row is constant."""
        col = np.asarray(weights, dtype=float).reshape(-1, 1)
        return cls(np.repeat(col, m, axis=1))

    def is_identical(self) -> bool:
        return bool(np.all(self.w == self.w[:, :1]))

    # -- serialization -----------------------------------------------------

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        for row in self.w:
            writer.writerow([repr(float(x)) for x in row])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text: str) -> "WeightMatrix":
        rows = [r for r in csv.reader(io.StringIO(text)) if r and any(c.strip() for c in r)]
        return cls(np.array([[float(c) for c in r] for r in rows], dtype=float))

    def to_json(self) -> str:
        return json.dumps({"n": self.n, "m": self.m, "w": self.w.tolist()})

    @classmethod
    def from_json(cls, text: str) -> "WeightMatrix":
        obj = json.loads(text)
        wm = cls(np.array(obj["w"], dtype=float))
        if (obj.get("n", wm.n), obj.get("m", wm.m)) != (wm.n, wm.m):
            raise UnsupportedShapeError("declared n, m disagree with the w array")
        return wm


WeightsLike = Union[WeightMatrix, np.ndarray, Sequence[Sequence[float]]]


def as_array(W: WeightsLike) -> np.ndarray:
    if isinstance(W, WeightMatrix):
        return W.w
    w = np.asarray(W, dtype=float)
    if w.ndim != 2:
        raise UnsupportedShapeError(f"weight matrix must be 2-D, got shape {w.shape}")
    return w


def load_weights(path: str) -> WeightMatrix:
    with open(path) as fh:
        text = fh.read()
    if path.endswith(".json"):
        return WeightMatrix.from_json(text)
    return WeightMatrix.from_csv(text)


class Allocation:
    """Map from users to basestations; ``-1`` marks a user not (yet) assigned."""

    def __init__(self, assign: Iterable[int], m: int):
        self.assign = np.asarray(list(assign) if not isinstance(assign, np.ndarray) else assign, dtype=int)
        self.m = int(m)

    @classmethod
    def from_sets(cls, sets: Sequence[Iterable[int]], n: int) -> "Allocation":
        assign = np.full(n, -1, dtype=int)
        for j, members in enumerate(sets):
            for i in members:
                assign[i] = j
        return cls(assign, len(sets))

    @property
    def n(self) -> int:
        return len(self.assign)

    @property
    def degrees(self) -> np.ndarray:
        a = self.assign[self.assign >= 0]
        return np.bincount(a, minlength=self.m)

    def members(self, j: int) -> np.ndarray:
        return np.flatnonzero(self.assign == j)

    def is_total(self) -> bool:
        return bool(np.all(self.assign >= 0))

    def one_based(self) -> list:
        return [int(a) + 1 if a >= 0 else 0 for a in self.assign]

    def __repr__(self) -> str:
        return f"Allocation(assign={self.one_based()}, m={self.m})"


def ts_utility(alloc: Union[Allocation, Sequence[int]], W: WeightsLike) -> float:
    """Time-sharing sum-rate: each basestation contributes the mean rate of its users.

    A basestation with no users contributes 0.  Sums are correctly rounded
    (``math.fsum``), so the value depends only on which users share each
    basestation, not on their order.
    """
    w = as_array(W)
    n, m = w.shape
    assign = alloc.assign if isinstance(alloc, Allocation) else np.asarray(alloc, dtype=int)
    if len(assign) > n:
        raise InvalidAllocationError(f"allocation covers {len(assign)} users but W has {n} rows")
    users = np.flatnonzero(assign >= 0)
    bs = assign[users]
    if bs.size and bs.max() >= m:
        raise InvalidAllocationError(f"basestation index {int(bs.max())} out of range for m={m}")
    rates = w[users, bs]
    order = np.argsort(bs, kind="stable")
    groups = np.split(rates[order], np.flatnonzero(np.diff(bs[order])) + 1) if bs.size else []
    return math.fsum(math.fsum(g) / g.size for g in groups)


# -- arrival orders ----------------------------------------------------------


def validate_order(order: Sequence[int], n: int) -> np.ndarray:
    order = np.asarray(order, dtype=int)
    if order.shape != (n,):
        raise UnsupportedShapeError(f"order has length {order.size}, expected {n}")
    if not np.array_equal(np.sort(order), np.arange(n)):
        raise UnsupportedShapeError("order is not a permutation")
    return order


def random_order(n: int, rng: np.random.Generator) -> np.ndarray:
    """Uniformly random arrival order."""
    return rng.permutation(n)


def permute_rows(W: WeightsLike, order: Sequence[int]) -> np.ndarray:
    """Row ``i`` of the result is row ``order[i]`` of ``W``."""
    w = as_array(W)
    return w[validate_order(order, w.shape[0])]


# -- online execution --------------------------------------------------------


class Move(NamedTuple):
    """Reassignment of an earlier arrival; ``dst is None`` deletes it."""

    user: int
    src: int
    dst: Optional[int]


class Decision(NamedTuple):
    basestation: Optional[int]
    move: Optional[Move] = None


class TraceEntry(NamedTuple):
    position: int
    user: int
    basestation: Optional[int]
    move: Optional[Move]


@dataclass
class DecisionTrace:
    entries: list = field(default_factory=list)
    utility: float = 0.0

    def __len__(self) -> int:
        return len(self.entries)

    def moves(self) -> list:
        return [e.move for e in self.entries if e.move is not None]


class OnlineAlgorithm:
    """Base class for online allocation policies.

    ``start`` is called once with the problem size and the run's generator.
    ``arrive`` is then called for arrival positions 0..n-1 with that user's row
    only and returns a ``Decision``.  Earlier users are referred to by their
    arrival position.

    Class flags:
      total            -- every user must be assigned at the end (False for matchers)
      reassigns        -- may return a ``Move``
      comparison_based -- decisions depend only on order comparisons between
                          weights, so any increasing transform of W leaves the
                          trace unchanged
    """

    name = "online"
    total = True
    reassigns = False
    comparison_based = True

    def start(self, n: int, m: int, rng: np.random.Generator) -> None:
        self.n, self.m, self.rng = n, m, rng

    def arrive(self, i: int, row: np.ndarray) -> Decision:
        raise NotImplementedError

    def __repr__(self) -> str:
        return f"{type(self).__name__}()"


def run_online(
    alg: OnlineAlgorithm,
    W: WeightsLike,
    seed=None,
    order: Optional[Sequence[int]] = None,
    keep_trace: bool = True,
):
    """Reveal the rows of ``W`` one at a time to ``alg``.

    With ``order`` given, arrival position ``k`` reveals row ``order[k]`` and the
    returned allocation is indexed by the original rows.  Returns
    ``(Allocation, DecisionTrace)``; the trace's ``utility`` is maintained
    incrementally and should agree with ``ts_utility``.
    """
    w = as_array(W)
    n, m = w.shape
    rows = np.arange(n) if order is None else validate_order(order, n)
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    alg.start(n, m, rng)

    assign = np.full(n, -1, dtype=int)
    sums = np.zeros(m)
    deg = np.zeros(m, dtype=int)
    trace = DecisionTrace()
    total, reassigns = alg.total, alg.reassigns

    for pos in range(n):
        user = int(rows[pos])
        row = w[user].copy()
        row.flags.writeable = False
        decision = alg.arrive(pos, row)
        bs, move = decision
        moved = None
        if move is not None:
            if not reassigns:
                raise ContractViolation(f"{alg.name} is not a reassigning algorithm but returned a move")
            if not 0 <= move.user < pos:
                raise ContractViolation(f"move refers to arrival {move.user}, not an earlier one")
            mu = int(rows[move.user])
            if assign[mu] != move.src:
                raise ContractViolation(f"move source {move.src} does not hold arrival {move.user}")
            if move.dst is None:
                if total:
                    raise ContractViolation("deletions are not allowed for total allocations")
            elif not 0 <= move.dst < m:
                raise ContractViolation(f"move destination {move.dst} out of range")
            sums[move.src] -= w[mu, move.src]
            deg[move.src] -= 1
            if move.dst is None:
                assign[mu] = -1
            else:
                assign[mu] = move.dst
                sums[move.dst] += w[mu, move.dst]
                deg[move.dst] += 1
            moved = Move(mu, move.src, move.dst)
        if bs is None:
            if total:
                raise ContractViolation(f"{alg.name} left arrival {pos} unassigned")
        else:
            if not 0 <= bs < m:
                raise ContractViolation(f"{alg.name} chose basestation {bs} outside 0..{m - 1}")
            assign[user] = bs
            sums[bs] += w[user, bs]
            deg[bs] += 1
        if keep_trace:
            trace.entries.append(TraceEntry(pos, user, bs, moved))

    busy = deg > 0
    trace.utility = float(np.sum(sums[busy] / deg[busy]))
    return Allocation(assign, m), trace
