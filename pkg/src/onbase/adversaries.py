"""Lower-bound input families and random input models.

Geometric families have entries like beta**n that overflow doubles for large
n, so every family is built first as a matrix of natural-log weights (-inf
for a zero entry).  The direct generators exponentiate that matrix and refuse
when the result is not representable.
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, replace
from typing import Optional

import numpy as np
from scipy.special import logsumexp

from .errors import ConfigError
from .model import Allocation, WeightMatrix, as_array
from .offline import BRUTE_FORCE_LIMIT, brute_force_optimal

FAMILY_KINDS = (
    "identical-geometric",
    "identical-geometric-padded",
    "arbitrary-worstcase",
    "maxweight-pathology",
    "reassign-pair",
)

# exp() of anything above this would leave double range
_LOG_MAX = np.log(1e300)


@dataclass(frozen=True)
class AdversaryFamily:
    kind: str
    n: int
    m: int = 2
    beta: float = 10.0
    eps: float = 1e-2
    l: Optional[int] = None
    a: float = 1.0
    b: float = 100.0
    c: float = 101.0
    x: float = 1e6

    def __post_init__(self):
        if self.kind not in FAMILY_KINDS:
            raise ConfigError(f"unknown family {self.kind!r}; valid: {', '.join(FAMILY_KINDS)}")
        if self.n < 1 or self.m < 1:
            raise ConfigError("n and m must be positive")
        if self.kind != "reassign-pair" and self.beta <= 1:
            raise ConfigError(f"beta must exceed 1, got {self.beta}")
        if self.kind == "arbitrary-worstcase" and not 0 < self.eps < 1:
            raise ConfigError(f"eps must lie in (0, 1), got {self.eps}")
        if self.kind == "maxweight-pathology" and self.m != 2:
            raise ConfigError("the max-weight pathology family has m = 2")
        if self.kind == "reassign-pair":
            if self.m != 2:
                raise ConfigError("the reassignment pair has m = 2")
            if self.n % 2 or self.n < 4:
                raise ConfigError(f"reassignment pair needs an even n >= 4, got {self.n}")
            if not 0 < self.a < self.b <= self.c < self.x:
                raise ConfigError("reassignment pair needs 0 < a < b <= c < x")

    @property
    def identical(self) -> bool:
        return self.kind.startswith("identical")

    def members(self) -> list:
        """Indices addressing the matrices of the family."""
        if self.l is not None:
            return [self.l]
        if self.kind == "identical-geometric-padded":
            return list(range(1, (self.n + 1) // 2 + 1))
        if self.kind == "maxweight-pathology":
            return [self.n]
        if self.kind == "reassign-pair":
            return [1, 2]
        return list(range(1, self.n + 1))

    def _build(self, l: Optional[int], log: bool) -> np.ndarray:
        # one layout routine for both scales; ``log`` picks natural-log entries
        l = self.members()[-1] if l is None else l
        n, m = self.n, self.m
        if log:
            zero, power = -np.inf, lambda k: k * np.log(self.beta)
            val = np.log
        else:
            zero, power = 0.0, lambda k: self.beta ** k
            val = float
        if self.kind in ("identical-geometric", "identical-geometric-padded", "arbitrary-worstcase"):
            padded = self.kind == "identical-geometric-padded"
            span = 2 * l - 1 if padded else l
            if not 1 <= l or span > n:
                raise ConfigError(f"member l={l} does not fit in n={n}")
            fill = val(self.eps) if self.kind == "arbitrary-worstcase" else zero
            col = np.full(n, fill)
            pos = np.arange(l) * (2 if padded else 1)
            col[pos] = power(np.arange(1, l + 1, dtype=float))
            if self.kind == "arbitrary-worstcase":
                M = np.full((n, m), val(self.eps))
                M[:, 0] = col
                return M
            return np.repeat(col[:, None], m, axis=1)
        if self.kind == "maxweight-pathology":
            i = np.arange(1, n + 1, dtype=float)
            return np.column_stack([power(i), power(i - 0.5)])
        # reassign-pair
        if l not in (1, 2):
            raise ConfigError("reassignment pair members are 1 and 2")
        a, b, c, x = (val(v) for v in (self.a, self.b, self.c, self.x))
        h = n // 2
        M = np.empty((n, 2))
        M[:h] = (b, a)
        M[h : n - 1] = (a, c)
        M[n - 1] = (x, a) if l == 1 else (a, x)
        return M

    def log_weights(self, l: Optional[int] = None) -> np.ndarray:
        return self._build(l, log=True)

    def weights(self, l: Optional[int] = None) -> np.ndarray:
        if np.max(self._build(l, log=True)) > _LOG_MAX:
            raise ConfigError("family entries overflow double precision; use the log-space path")
        return self._build(l, log=False)

    def opt_log(self, l: Optional[int] = None):
        """Log of the offline optimum, or of a feasible lower bound on it.

        Returns ``(log_value, exact)``.
        """
        L = self.log_weights(l)
        n, m = L.shape
        if m == 1:
            return float(logsumexp(L[:, 0]) - np.log(n)), True
        if self.identical:
            if m >= n:
                return float(logsumexp(L[:, 0])), True
            col = np.sort(L[:, 0])[::-1]
            top = logsumexp(col[: m - 1]) if m > 1 else -np.inf
            rest = logsumexp(col[m - 1 :]) - np.log(n - m + 1)
            return float(np.logaddexp(top, rest)), True
        if self.kind == "arbitrary-worstcase":
            # column 0 is worth at most its heaviest entry and every other column
            # at most eps; one user alone on column 0 plus the rest spread over
            # the others reaches both caps
            ell = self.members()[-1] if l is None else l
            others = min(m - 1, n - 1)
            return float(np.logaddexp(ell * np.log(self.beta), np.log(others * self.eps) if others else -np.inf)), True
        if m**n <= BRUTE_FORCE_LIMIT and np.max(L) <= _LOG_MAX:
            val, _ = brute_force_optimal(np.exp(L))
            return float(np.log(val)), True
        # heaviest user alone on column 0, everybody else shares column 1
        assign = np.ones(n, dtype=int)
        assign[int(np.argmax(L[:, 0]))] = 0
        return log_space_ts(Allocation(assign, m), L), False


def log_space_ts(alloc, family, l: Optional[int] = None) -> float:
    """Natural log of the time-sharing utility, evaluated without overflow.

    ``family`` is an ``AdversaryFamily`` or a matrix of log weights.
    """
    L = family.log_weights(l) if isinstance(family, AdversaryFamily) else np.asarray(family, dtype=float)
    assign = alloc.assign if isinstance(alloc, Allocation) else np.asarray(alloc, dtype=int)
    parts = []
    for j in range(L.shape[1]):
        users = np.flatnonzero(assign == j)
        if users.size:
            parts.append(logsumexp(L[users, j]) - np.log(users.size))
    return float(logsumexp(parts)) if parts else -np.inf


def rank_transform(L: np.ndarray) -> np.ndarray:
    """Dense ranks of all entries (smallest -> 0).

    Comparison-based policies make the same decisions on the ranks as on the
    original weights.
    """
    _, inv = np.unique(L, return_inverse=True)
    return inv.reshape(L.shape).astype(float)


def gen_identical_geometric(n: int, m: int, beta: float, l: int) -> WeightMatrix:
    return WeightMatrix(AdversaryFamily("identical-geometric", n, m, beta=beta).weights(l))


def gen_identical_geometric_padded(n: int, m: int, beta: float, l: int) -> WeightMatrix:
    return WeightMatrix(AdversaryFamily("identical-geometric-padded", n, m, beta=beta).weights(l))


def gen_arbitrary_worstcase(n: int, m: int, beta: float, eps: float, l: int) -> WeightMatrix:
    return WeightMatrix(AdversaryFamily("arbitrary-worstcase", n, m, beta=beta, eps=eps).weights(l))


def gen_maxweight_pathology(n: int, beta: float) -> WeightMatrix:
    return WeightMatrix(AdversaryFamily("maxweight-pathology", n, 2, beta=beta).weights())


def gen_reassign_pair(n: int, a: float = 1.0, b: float = 100.0, c: float = 101.0, x: float = 1e6):
    fam = AdversaryFamily("reassign-pair", n, 2, a=a, b=b, c=c, x=x)
    return WeightMatrix(fam.weights(1)), WeightMatrix(fam.weights(2))


_FLOAT_KEYS = {"beta", "eps", "a", "b", "c", "x"}
_INT_KEYS = {"n", "m", "l"}


def parse_adversary(text: str, **defaults) -> AdversaryFamily:
    """Parse ``kind:key=value,...``, e.g. ``identical-geometric:beta=10,l=20``."""
    kind, _, rest = text.partition(":")
    params = {k: v for k, v in defaults.items() if v is not None}
    for item in filter(None, rest.split(",")):
        key, sep, value = item.partition("=")
        key = key.strip()
        if not sep or key not in _FLOAT_KEYS | _INT_KEYS:
            raise ConfigError(f"bad adversary parameter {item!r}")
        params[key] = int(value) if key in _INT_KEYS else float(value)
    if "n" not in params:
        raise ConfigError("adversary needs n")
    return AdversaryFamily(kind.strip(), **params)


# -- random models -------------------------------------------------------------

MODEL_KINDS = ("iid-uniform", "correlated")


@dataclass(frozen=True)
class RandomModel:
    """Random weight model.

    iid-uniform: entries iid U[lo, hi]; with ``identical`` one value per user
    is replicated across basestations.
    correlated: column j has mean ``means[j]`` (default 10 for the first
    basestation and 5 for the rest).  With ``coupling="shared"`` a user's rates
    are its per-user gain g times the column means, so rates to different
    basestations are fully correlated; ``"independent"`` draws every entry on
    its own.  ``dist`` picks the law of g (uniform on [0, 2] or unit
    exponential), so each column is uniform on [0, 2 * mean] or exponential.
    """

    kind: str = "iid-uniform"
    lo: float = 0.0
    hi: float = 10.0
    means: Optional[tuple] = None
    dist: str = "uniform"
    coupling: str = "shared"
    identical: bool = False

    def __post_init__(self):
        if self.kind not in MODEL_KINDS:
            raise ConfigError(f"unknown model {self.kind!r}; valid: {', '.join(MODEL_KINDS)}")
        if self.lo < 0 or self.hi < self.lo:
            raise ConfigError("need 0 <= lo <= hi")
        if self.dist not in ("uniform", "exponential"):
            raise ConfigError(f"unknown dist {self.dist!r}")
        if self.coupling not in ("shared", "independent"):
            raise ConfigError(f"unknown coupling {self.coupling!r}")
        if self.means is not None and min(self.means) <= 0:
            raise ConfigError("means must be positive")
        if self.identical and self.kind != "iid-uniform":
            raise ConfigError("identical basestations are only defined for the iid-uniform model")

    def column_means(self, m: int) -> np.ndarray:
        if self.means is not None:
            if len(self.means) != m:
                raise ConfigError(f"model has {len(self.means)} means but m={m}")
            return np.asarray(self.means, dtype=float)
        return np.array([10.0] + [5.0] * (m - 1))

    def describe(self) -> dict:
        return asdict(self)


def sample_random_model(model: RandomModel, n: int, m: int, rng: np.random.Generator) -> np.ndarray:
    if model.kind == "iid-uniform":
        if model.identical:
            return np.repeat(rng.uniform(model.lo, model.hi, size=(n, 1)), m, axis=1)
        return rng.uniform(model.lo, model.hi, size=(n, m))
    mu = model.column_means(m)
    shape = (n, 1) if model.coupling == "shared" else (n, m)
    if model.dist == "uniform":
        g = rng.uniform(0.0, 2.0, size=shape)
    else:
        g = rng.exponential(1.0, size=shape)
    return g * mu
