"""Independent reference implementations used as test oracles.

Nothing here imports the package under test; everything is plain
enumeration with itertools and Fractions.
"""

import itertools
from fractions import Fraction


def ts(assign, W):
    """Time-sharing utility by direct summation over basestations."""
    m = len(W[0])
    total = 0
    for j in range(m):
        users = [i for i, a in enumerate(assign) if a == j]
        if users:
            total += sum(W[i][j] for i in users) / len(users)
    return total


def best_partition(W):
    """Exhaustive optimum over all m**n assignments."""
    n, m = len(W), len(W[0])
    return max(ts(a, W) for a in itertools.product(range(m), repeat=n))


def best_matching(W):
    """Exhaustive max-weight matching (users may stay unmatched)."""
    n, m = len(W), len(W[0])
    best = 0.0
    for k in range(0, min(n, m) + 1):
        for users in itertools.combinations(range(n), k):
            for cols in itertools.permutations(range(m), k):
                best = max(best, sum(W[u][c] for u, c in zip(users, cols)))
    return best


def secretary_success(n, r):
    """Exact success probability of the single-stop rule by enumerating orders."""
    hits = 0
    perms = list(itertools.permutations(range(1, n + 1)))
    for p in perms:
        T = max(p[:r]) if r else 0
        chosen = None
        for i in range(r, n):
            if p[i] >= T:
                chosen = p[i]
                break
        if chosen is None:
            chosen = p[-1]
        hits += chosen == n
    return Fraction(hits, len(perms))


def selected_count_law(n, r, k):
    """Law of the number of arrivals after position r that beat the k-th best
    seen so far (k = 1 gives running strict maxima), by enumerating orders."""
    counts = {}
    perms = list(itertools.permutations(range(1, n + 1)))
    for p in perms:
        s = 0
        for i in range(r, n):
            seen = sorted(p[:i], reverse=True)
            T = seen[k - 1] if len(seen) >= k else float("-inf")
            if p[i] > T:
                s += 1
        counts[s] = counts.get(s, 0) + 1
    return {d: Fraction(c, len(perms)) for d, c in counts.items()}


def elementary_symmetric(values, d):
    """Sum of products over all d-subsets, by direct enumeration."""
    total = Fraction(0)
    for combo in itertools.combinations(values, d):
        prod = Fraction(1)
        for v in combo:
            prod *= v
        total += prod
    return total
