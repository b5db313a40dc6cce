"""Constructive Seeker/Hider strategies, each with the round bound it guarantees.

All Seeker rules here depend on the current state only. Interleaved
block games over a partitioned horizon become sequential phases: a phase
ends once its own goal holds, and the goal stays satisfied because later
rounds only shrink the state.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from . import pointset as ps
from .constructions import (
    SpaceFamily,
    cylinder_first,
    cylinder_second,
    product,
    project_first,
    project_second,
    sum_family,
)
from .game import PS, GameError, GameGoal, Solver, Strategy, is_terminal, log2ceil
from .pointset import PointSet
from .space import FiniteSpace, interior, is_closed, is_discrete


class NotSeparating(GameError):
    pass


class NotT1(GameError):
    pass


@dataclass(frozen=True)
class Inapplicable:
    """A construction whose hypothesis fails on this input."""

    reason: str


@dataclass(frozen=True)
class SeparatingFamily:
    n: int
    members: tuple[PointSet, ...]

    def unsplit_pair(self) -> tuple[int, int] | None:
        for p in range(self.n):
            for q in range(p + 1, self.n):
                if not any((A >> p & 1) != (A >> q & 1) for A in self.members):
                    return p, q
        return None

    def separates(self) -> bool:
        return self.unsplit_pair() is None


def binary_coding_family(n: int) -> SeparatingFamily:
    """Member ``a`` holds the indices whose bit ``a`` is set."""
    bits = log2ceil(n)
    members = tuple(
        ps.from_members(x for x in range(n) if x >> a & 1) for a in range(bits)
    )
    return SeparatingFamily(n, members)


def _require_separating(fam: SeparatingFamily) -> None:
    pair = fam.unsplit_pair()
    if pair is not None:
        raise NotSeparating(f"no member splits points {pair[0]} and {pair[1]}")


def sequential_separating_seeker(X: FiniteSpace, fam: SeparatingFamily | None = None) -> Strategy:
    """Point-separating Seeker built from one membership game per member.

    Plays an optimal strategy for the first member whose membership is still
    undecided. Wins within the sum of the members' membership numbers.
    """
    fam = fam or binary_coding_family(X.n)
    if fam.n != X.n:
        raise NotSeparating("family is over a different point set")
    _require_separating(fam)
    solvers = [Solver(X, GameGoal(A)) for A in fam.members]
    bound = sum(s.value() for s in solvers)

    def rule(W: PointSet) -> PointSet:
        for s in solvers:
            if not is_terminal(s.goal, W):
                return s.best_move(W)
        return X.full

    return Strategy("seeker", X, PS, rule, "seqsep", bound)


def two_move_membership(X: FiniteSpace, Y: PointSet) -> Strategy | Inapplicable:
    """Ask ``int(Y)``, then the complement of ``F = Y - int(Y)``; needs ``F`` closed."""
    U = interior(X, Y)
    F = Y & ~U
    if not is_closed(X, F):
        return Inapplicable(f"{ps.fmt(F, X.names)} = Y minus its interior is not closed")
    goal = GameGoal(Y)
    rest = X.full & ~F

    def rule(W: PointSet) -> PointSet:
        if is_terminal(goal, W):
            return X.full
        return rest if W & U == 0 else U

    return Strategy("seeker", X, goal, rule, "two_move", 2)


def sum_seeker(parts: Sequence[FiniteSpace], fam_on_indices: SeparatingFamily | None = None) -> Strategy:
    """Point-separating Seeker on a sum: locate the summand, then separate inside it.

    Identification asks the union of the summands in the first family
    member that splits the summands still meeting the state; each member is
    asked at most once.
    """
    fam = sum_family(parts)
    k = fam.k
    index_fam = fam_on_indices or binary_coding_family(k)
    if index_fam.n != k:
        raise NotSeparating("index family size differs from the number of summands")
    _require_separating(index_fam)
    inner = [Solver(p, PS) for p in fam.parts]
    unions = [
        sum(fam.block(i) for i in ps.iter_members(A)) for A in index_fam.members
    ]
    X = fam.space
    bound = len(index_fam.members) + max(s.value() for s in inner)

    def rule(W: PointSet) -> PointSet:
        live = [i for i in range(k) if W & fam.block(i)]
        if len(live) > 1:
            for A, union in zip(index_fam.members, unions):
                side = {A >> i & 1 for i in live}
                if len(side) == 2:
                    return union
        if not live:
            return X.full
        i = live[0]
        local = fam.restrict(i, W)
        if is_terminal(PS, local):
            return X.full
        return fam.lift(i, inner[i].best_move(local))

    return Strategy("seeker", X, PS, rule, "sum", bound)


def product_seeker(a: FiniteSpace, b: FiniteSpace) -> Strategy:
    """Separate the first coordinate through cylinders, then the second."""
    X = product(a, b)
    sa, sb = Solver(a, PS), Solver(b, PS)
    bound = sa.value() + sb.value()

    def rule(W: PointSet) -> PointSet:
        first = project_first(a, b, W)
        if first.bit_count() > 1:
            return cylinder_first(a, b, sa.best_move(first))
        second = project_second(a, b, W)
        if second.bit_count() > 1:
            return cylinder_second(a, b, sb.best_move(second))
        return X.full

    return Strategy("seeker", X, PS, rule, "product", bound)


def sum_membership_seeker(parts: Sequence[FiniteSpace], Y: PointSet) -> Strategy:
    """Membership Seeker on a sum: run every summand's optimal game in one union
    per round, then one move collecting the summands whose trace fell inside ``Y``."""
    fam = sum_family(parts)
    X = fam.space
    goal = GameGoal(Y)
    inner = [Solver(p, GameGoal(fam.restrict(i, Y))) for i, p in enumerate(fam.parts)]
    bound = max(s.value() for s in inner) + 1

    def rule(W: PointSet) -> PointSet:
        if is_terminal(goal, W):
            return X.full
        move, pending = 0, False
        for i, s in enumerate(inner):
            local = fam.restrict(i, W)
            if not is_terminal(s.goal, local):
                pending = True
                move |= fam.lift(i, s.best_move(local))
        if pending:
            return move
        return _inside_blocks(fam, W, Y)

    return Strategy("seeker", X, goal, rule, "summem", bound)


def _inside_blocks(fam: SpaceFamily, W: PointSet, Y: PointSet) -> PointSet:
    out = 0
    for i in range(fam.k):
        blk = fam.block(i)
        if W & blk & ~Y == 0:
            out |= blk
    return out


def column_elimination_seeker(parts: Sequence[FiniteSpace], Y: PointSet) -> Strategy:
    """Membership Seeker on a sum of discrete spaces.

    Row ``r`` is the set of ``r``-th points of all summands. The Seeker
    removes the lowest row still present until one row remains (a 0 reply
    pins the state to that row), then asks the union of the summands whose
    point in that row lies in ``Y``. Wins within the largest summand size.
    """
    for i, p in enumerate(parts):
        if not is_discrete(p):
            raise NotT1(f"summand {i} is not discrete")
    fam = sum_family(parts)
    X = fam.space
    goal = GameGoal(Y)
    width = max(p.n for p in fam.parts)
    rows = [
        sum(1 << (fam.offsets[i] + r) for i in range(fam.k) if r < fam.parts[i].n)
        for r in range(width)
    ]

    def rule(W: PointSet) -> PointSet:
        if is_terminal(goal, W):
            return X.full
        present = [r for r in range(width) if W & rows[r]]
        if len(present) > 1:
            return X.full & ~rows[present[0]]
        r = present[0]
        return sum(
            fam.block(i)
            for i in range(fam.k)
            if r < fam.parts[i].n and Y >> (fam.offsets[i] + r) & 1
        )

    return Strategy("seeker", X, goal, rule, "colelim", width)


def greedy_hider(X: FiniteSpace, goal: GameGoal = PS, solver: Solver | None = None) -> Strategy:
    """Reply into the branch that is nonterminal, then has the larger value
    already in ``solver``'s memo (if given), then is larger; ties pick 1."""

    def score(branch: PointSet, bit: int) -> tuple:
        known = -1
        if solver is not None:
            known = solver.memo.get(solver.counts(branch), -1)
        return (not is_terminal(goal, branch), known, branch.bit_count(), bit)

    def rule(W: PointSet, U: PointSet) -> int:
        return 1 if score(W & U, 1) > score(W & ~U, 0) else 0

    return Strategy("hider", X, goal, rule, "greedy")
