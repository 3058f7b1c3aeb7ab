"""Exact and asymptotic probability laws and ratio bounds for the threshold rules.

Under a uniformly random arrival order with distinct weights, arrival i is
among the best k of the first i arrivals with probability min(1, k/i),
independently across i.  The selection counts of the threshold rules are
therefore Poisson-binomial and can be computed exactly by a short DP.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Optional

import numpy as np


@dataclass
class DistributionTable:
    """Pr(X = d) for d = 0..dmax."""

    probs: list
    complete: bool
    note: str = ""

    @property
    def support(self) -> np.ndarray:
        return np.arange(len(self.probs))

    def __getitem__(self, d: int):
        return self.probs[d] if 0 <= d < len(self.probs) else 0.0

    def as_array(self) -> np.ndarray:
        return np.array([float(p) for p in self.probs])

    def to_dict(self) -> dict:
        return {"support": self.support.tolist(), "probs": [float(p) for p in self.probs],
                "complete": self.complete, "note": self.note}


@dataclass
class BoundReport:
    alpha: float
    dmax: Optional[int]
    value: float
    m: int = 2
    n: Optional[int] = None

    def to_dict(self) -> dict:
        return {"alpha": self.alpha, "dmax": self.dmax, "value": self.value, "m": self.m,
                "n": "inf" if self.n is None else self.n}


def secretary_success_exact(n: int, r: int, exact: bool = False):
    """Probability that the single-stop rule with r test users picks the best user."""
    if not 0 <= r < n:
        raise ValueError(f"need 0 <= r < n, got r={r}, n={n}")
    if r == 0:
        # the first arrival always clears an empty threshold
        return Fraction(1, n) if exact else 1.0 / n
    if exact:
        return sum((Fraction(r, n * (i - 1)) for i in range(r + 1, n + 1)), Fraction(0))
    return r / n * math.fsum(1.0 / (i - 1) for i in range(r + 1, n + 1))


def _count_dp(probs, dmax: int, exact: bool) -> list:
    # distribution of the number of successes among independent trials
    one = Fraction(1) if exact else 1.0
    dist = [one] + [0 * one] * dmax
    for q in probs:
        for d in range(dmax, 0, -1):
            dist[d] = dist[d] * (one - q) + dist[d - 1] * q
        dist[0] = dist[0] * (one - q)
    return dist


def selected_distribution_exact(n: int, r: int, m: int, dmax: Optional[int] = None,
                                exact: bool = False) -> DistributionTable:
    """Law of the number of users selected by the (m-1)-best threshold rule.

    Arrival i > r is selected iff it ranks among the best m-1 of the first i,
    which happens with probability min(1, (m-1)/i).
    """
    if m < 2:
        raise ValueError("need m >= 2")
    if not 0 <= r <= n:
        raise ValueError(f"need 0 <= r <= n, got r={r}")
    k = m - 1
    dmax = n - r if dmax is None else dmax
    if exact:
        probs = [min(Fraction(1), Fraction(k, i)) for i in range(r + 1, n + 1)]
    else:
        probs = [min(1.0, k / i) for i in range(r + 1, n + 1)]
    note = "r < m-1: the first arrivals are selected with certainty" if r < k else ""
    return DistributionTable(_count_dp(probs, dmax, exact), complete=dmax >= n - r, note=note)


def degree_distribution_exact(n: int, r: int, dmax: Optional[int] = None,
                              exact: bool = False) -> DistributionTable:
    """Law of the number of running maxima after the r test users (two basestations)."""
    table = selected_distribution_exact(n, r, 2, dmax, exact)
    if r == 0:
        table.note = "r = 0: the first arrival is always a running maximum"
    return table


def degree_asymptote(n: int, r: int, d: int) -> float:
    return r / n * math.log(n / r) ** d / math.factorial(d)


def selected_asymptote(n: int, r: int, m: int, d: int) -> float:
    return (r / n) ** (m - 1) * ((m - 1) * math.log(n / r)) ** d / math.factorial(d)


def _upper(dmax: Optional[int], n: Optional[int], alpha: float) -> int:
    caps = []
    if dmax is not None:
        caps.append(dmax)
    if n is not None:
        caps.append(int(math.floor(n * (1 - alpha) + 1e-9)))
    if not caps:
        raise ValueError("give dmax or n")
    return min(caps)


def bound_two_bs(alpha: float, dmax: Optional[int] = 10, n: Optional[int] = None) -> BoundReport:
    """Lower bound on the expected performance ratio of the repeated-selection
    rule with r = alpha * n test users, truncated at dmax terms."""
    return bound_m_bs(alpha, 2, dmax, n)


def bound_m_bs(alpha: float, m: int, dmax: Optional[int] = 10, n: Optional[int] = None) -> BoundReport:
    """Same bound for m basestations: degree d selected users are spread
    round-robin, so each selected basestation holds at most ceil(d/(m-1))."""
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if m < 2:
        raise ValueError("need m >= 2")
    k = m - 1
    lam = k * math.log(1 / alpha)
    top = _upper(dmax, n, alpha)
    terms = []
    for d in range(k, top + 1):
        log_term = k * math.log(alpha) + d * math.log(lam) - math.lgamma(d + 1)
        terms.append(math.exp(log_term) / math.ceil(d / k))
    return BoundReport(alpha, dmax, math.fsum(terms), m, n)


def best_alpha(m: int = 2, dmax: Optional[int] = 10, grid=None) -> tuple:
    """Grid maximizer of the bound; returns ``(alpha, value)``."""
    grid = np.round(np.arange(0.01, 1.0, 0.01), 2) if grid is None else grid
    vals = [bound_m_bs(float(a), m, dmax).value for a in grid]
    k = int(np.argmax(vals))
    return float(grid[k]), vals[k]


def a_d_exact(t: int, n: int, d: int, exact: bool = False):
    """Sum of 1/(i_1 ... i_d) over t+1 <= i_1 < ... < i_d <= n.

    Elementary symmetric polynomial of {1/i}; compensated summation keeps
    double-precision error near one ulp.
    """
    return _esym(t, n, d, 1, exact)


def _esym(t: int, n: int, d: int, c: int, exact: bool):
    # e_d of {c/i : t < i <= n}, i.e. c**d * A_d; a c > 1 keeps small tail
    # probabilities out of the subnormal range
    if d == 0:
        return Fraction(1) if exact else 1.0
    if t < 0:
        raise ValueError("t must be nonnegative")
    if t + d > n:
        return Fraction(0) if exact else 0.0
    if exact:
        e = [Fraction(1)] + [Fraction(0)] * d
        for i in range(t + 1, n + 1):
            x = Fraction(c, i)
            for k in range(d, 0, -1):
                e[k] += x * e[k - 1]
        return e[d]
    e = [1.0] + [0.0] * d
    comp = [0.0] * (d + 1)
    for i in range(t + 1, n + 1):
        x = c / i
        for k in range(d, 0, -1):
            y = x * e[k - 1] - comp[k]
            s = e[k] + y
            comp[k] = (s - e[k]) - y
            e[k] = s
    return e[d]


def a_d_asymptote(t: int, n: int, d: int) -> float:
    return math.log(n / t) ** d / math.factorial(d)


def selected_distribution_prefactor(n: int, r: int, m: int, exact: bool = False):
    """r(r-1)...(r-m+2) / (n(n-1)...(n-m+2))."""
    num, den = 1, 1
    for k in range(m - 1):
        num *= r - k
        den *= n - k
    return Fraction(num, den) if exact else num / den


def selected_probability_via_prefactor(n: int, r: int, m: int, d: int, exact: bool = False):
    """Pr(S_n = d) as prefactor * (m-1)**d * A_d(r-m+1, n-m+1).

    For r = m-2 the prefactor vanishes while arrival m-1 is selected with
    certainty and its 1/(i-(m-1)) factor is singular; cancelling the pair
    leaves the shorter product times A_{d-1}(0, n-m+1).
    """
    k = m - 1
    if r == n:
        return (Fraction(int(d == 0)) if exact else float(d == 0))
    if r >= k:
        pre = selected_distribution_prefactor(n, r, m, exact)
        return pre * _esym(r - k, n - k, d, k, exact)
    if r == k - 1:
        if d == 0:
            return Fraction(0) if exact else 0.0
        num, den = 1, 1
        for j in range(m - 2):
            num *= r - j
        for j in range(m - 1):
            den *= n - j
        pre = Fraction(num, den) if exact else num / den
        return pre * k * _esym(0, n - k, d - 1, k, exact)
    raise ValueError("the product form needs r >= m-2")


ANALYTICS = {
    "secretary-success": lambda p: {"value": secretary_success_exact(int(p["n"]), int(p["r"]))},
    "degree-distribution": lambda p: degree_distribution_exact(
        int(p["n"]), int(p["r"]), _opt_int(p.get("dmax"))).to_dict(),
    "selected-distribution": lambda p: selected_distribution_exact(
        int(p["n"]), int(p["r"]), int(p["m"]), _opt_int(p.get("dmax"))).to_dict(),
    "bound-two-bs": lambda p: bound_two_bs(float(p["alpha"]), _opt_int(p.get("dmax", 10)),
                                           _opt_int(p.get("n"))).to_dict(),
    "bound-m-bs": lambda p: bound_m_bs(float(p["alpha"]), int(p["m"]), _opt_int(p.get("dmax", 10)),
                                       _opt_int(p.get("n"))).to_dict(),
    "best-alpha": lambda p: dict(zip(("alpha", "value"), best_alpha(int(p.get("m", 2)),
                                                                     _opt_int(p.get("dmax", 10))))),
    "a-d": lambda p: {"value": a_d_exact(int(p["t"]), int(p["n"]), int(p["d"])),
                      "asymptote": a_d_asymptote(int(p["t"]), int(p["n"]), int(p["d"]))},
    "prefactor": lambda p: {"value": selected_distribution_prefactor(int(p["n"]), int(p["r"]), int(p["m"]))},
}


def _opt_int(v):
    return None if v is None else int(v)


def analytic_table(formula: str, **params) -> dict:
    """Evaluate a named formula; the result echoes the formula and parameters."""
    if formula not in ANALYTICS:
        raise KeyError(formula)
    return {"formula": formula, "params": params, "result": ANALYTICS[formula](params)}
