"""Brute-force reference computations.

Deliberately naive and independent of :mod:`topogames.game`'s solver:
no memo, no trace deduplication, no symmetry reduction. Only usable on
very small spaces.
"""

from __future__ import annotations

from itertools import combinations

from .pointset import PointSet, full, iter_subsets
from .space import FiniteSpace


def _seeker_wins(X: FiniteSpace, target: PointSet | None, W: PointSet, rounds: int) -> bool:
    if target is None:
        done = bin(W).count("1") <= 1
    else:
        done = (W & target) == 0 or (W & ~target) == 0
    if done:
        return True
    if rounds == 0:
        return False
    for U in X.opens:
        if _seeker_wins(X, target, W & U, rounds - 1) and _seeker_wins(
            X, target, W & ~U & X.full, rounds - 1
        ):
            return True
    return False


def naive_value(X: FiniteSpace, target: PointSet | None = None) -> int:
    """Least horizon at which the Seeker wins, by plain minimax over all opens."""
    rounds = 0
    while not _seeker_wins(X, target, X.full, rounds):
        rounds += 1
        if rounds > X.n:
            raise AssertionError("no finite value found; space is not T0?")
    return rounds


def brute_psw0(X: FiniteSpace) -> int:
    """Smallest family of open sets splitting every pair, over all families."""
    pairs = [(p, q) for p in range(X.n) for q in range(p + 1, X.n)]
    opens = X.opens
    for k in range(len(opens) + 1):
        for fam in combinations(opens, k):
            if all(any((U >> p & 1) != (U >> q & 1) for U in fam) for p, q in pairs):
                return k
    raise AssertionError("unreachable: the family of all opens separates a T0 space")


def count_t0_topologies(n: int) -> int:
    """Count T0 topologies on ``n`` labeled points by testing every family of subsets."""
    subsets = list(iter_subsets(full(n)))
    top = full(n)
    count = 0
    for code in range(1 << len(subsets)):
        fam = {s for k, s in enumerate(subsets) if code >> k & 1}
        if 0 not in fam or top not in fam:
            continue
        if any(a | b not in fam or a & b not in fam for a in fam for b in fam):
            continue
        sigs = {tuple((U >> x) & 1 for U in sorted(fam)) for x in range(n)}
        if len(sigs) == n:
            count += 1
    return count
