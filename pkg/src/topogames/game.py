"""Seeker/Hider cut-and-choose games on finite T0 spaces.

Each round the Seeker names an open set ``U`` and the Hider answers a bit
``i``; the state shrinks to ``W & U`` (``i = 1``) or ``W & ~U`` (``i = 0``).
The Seeker wins the point-separating game if the final state has at most
one point, and the set-membership game for a target ``Y`` if the final state
lies inside ``Y`` or misses it.

Values are computed by memoized backward induction. The game from state
``W`` only depends on the traces ``U & W``, and swapping two twin points of
the same target colour is an automorphism preserving the goal, so states
are memoized by their per-twin-class counts.
"""

from __future__ import annotations

import os
from collections.abc import Callable, Iterator
from dataclasses import dataclass, field

from . import pointset as ps
from .pointset import PointSet
from .report import InvariantReport
from .space import FiniteSpace, SizeCapError, is_open, twin_partition

DEFAULT_MAX_STATES = 1 << 22
DEFAULT_MAX_TARGETS = 1 << 8


class GameError(Exception):
    pass


class HiderCannotWin(GameError):
    pass


class NonOpenMove(GameError):
    pass


class ResourceLimitError(GameError):
    """The memo table outgrew its configured cap; no value was produced."""


def max_states_from_env() -> int:
    raw = os.environ.get("TOPOGAMES_MAX_STATES")
    return int(raw) if raw else DEFAULT_MAX_STATES


@dataclass(frozen=True)
class GameGoal:
    """``target is None`` is the point-separating game; otherwise set membership."""

    target: PointSet | None = None

    @property
    def kind(self) -> str:
        return "ps" if self.target is None else "sm"

    def describe(self, X: FiniteSpace | None = None) -> str:
        if self.target is None:
            return "ps"
        names = X.names if X is not None else None
        return f"sm{ps.fmt(self.target, names)}"


PS = GameGoal()


def membership(target: PointSet) -> GameGoal:
    return GameGoal(target)


def check_goal(X: FiniteSpace, goal: GameGoal) -> None:
    if goal.target is not None and goal.target >> X.n:
        raise IndexError("target has points outside the space")


def bracket(X: FiniteSpace, U: PointSet, i: int) -> PointSet:
    """``U`` for ``i = 1``, its complement for ``i = 0``."""
    return U if i else X.full & ~U


def trace(X: FiniteSpace, moves: list[PointSet], replies: list[int]) -> PointSet:
    if len(moves) != len(replies):
        raise ValueError("moves and replies must have equal length")
    out = X.full
    for U, i in zip(moves, replies):
        out &= bracket(X, U, i)
    return out


def is_terminal(goal: GameGoal, W: PointSet) -> bool:
    if goal.target is None:
        return W.bit_count() <= 1
    return W & ~goal.target == 0 or W & goal.target == 0


def traces(X: FiniteSpace, W: PointSet) -> list[PointSet]:
    """Distinct sets ``U & W`` over open ``U``: the up-sets of the order induced on ``W``."""
    order = [x for x in X.linear_extension()[::-1] if W >> x & 1]
    out: list[PointSet] = []

    def rec(k: int, acc: PointSet) -> None:
        if k == len(order):
            out.append(acc)
            return
        x = order[k]
        rec(k + 1, acc)
        if ps.is_subset(X.up[x] & W & ~(1 << x), acc):
            rec(k + 1, acc | 1 << x)

    rec(0, 0)
    return sorted(out)


def log2ceil(m: int) -> int:
    """Least ``k`` with ``m <= 2**k``."""
    if m < 0:
        raise ValueError("log2ceil needs m >= 0")
    return 0 if m <= 1 else (m - 1).bit_length()


class Solver:
    """Exact game values for one space and goal.

    The memo table belongs to this instance; share a solver only within one
    thread.
    """

    def __init__(self, X: FiniteSpace, goal: GameGoal = PS, max_states: int | None = None):
        check_goal(X, goal)
        self.X = X
        self.goal = goal
        self.max_states = max_states_from_env() if max_states is None else max_states
        colors = [0] * X.n
        if goal.target is not None:
            colors = [goal.target >> x & 1 for x in range(X.n)]
        self.classes = twin_partition(X, colors)
        m = len(self.classes)
        self.class_sizes = tuple(c.bit_count() for c in self.classes)
        cls_of = {}
        for j, c in enumerate(self.classes):
            for x in ps.iter_members(c):
                cls_of[x] = j
        self.class_of = cls_of
        self.above = []
        for j, c in enumerate(self.classes):
            x = (c & -c).bit_length() - 1
            mask = 0
            for y in ps.iter_members(X.up[x] & ~c):
                mask |= 1 << cls_of[y]
            self.above.append(mask)
        # classes above come first, so a class may be (partly) taken only
        # after every class over it is known to be full
        self.order = sorted(range(m), key=lambda j: self.above[j].bit_count())
        if goal.target is None:
            self.in_target = None
        else:
            self.in_target = tuple(bool(c & goal.target) for c in self.classes)
        self.memo: dict[tuple[int, ...], int] = {}

    # -- canonical states

    def counts(self, W: PointSet) -> tuple[int, ...]:
        return tuple((W & c).bit_count() for c in self.classes)

    def realize(self, W: PointSet, counts: tuple[int, ...]) -> PointSet:
        """The first ``counts[j]`` members of ``W`` in each class."""
        out = 0
        for j, k in enumerate(counts):
            if k:
                out |= _lowest(W & self.classes[j], k)
        return out

    def _terminal(self, w: tuple[int, ...]) -> bool:
        if self.in_target is None:
            return sum(w) <= 1
        inside = any(k for k, t in zip(w, self.in_target) if t)
        outside = any(k for k, t in zip(w, self.in_target) if not t)
        return not (inside and outside)

    def _lower_bound(self, w: tuple[int, ...]) -> int:
        if self._terminal(w):
            return 0
        if self.in_target is None:
            return log2ceil(sum(w))
        return 1

    def _moves(self, w: tuple[int, ...]) -> Iterator[tuple[int, ...]]:
        """Nontrivial trace classes at state ``w``, as count vectors."""
        order = self.order
        above = self.above
        cur = [0] * len(w)

        def rec(k: int, notfull: int) -> Iterator[tuple[int, ...]]:
            if k == len(order):
                yield tuple(cur)
                return
            j = order[k]
            size = w[j]
            if size == 0:
                yield from rec(k + 1, notfull)
                return
            cur[j] = 0
            yield from rec(k + 1, notfull | 1 << j)
            if above[j] & notfull:
                cur[j] = 0
                return
            for c in range(1, size + 1):
                cur[j] = c
                yield from rec(k + 1, notfull if c == size else notfull | 1 << j)
            cur[j] = 0

        for c in rec(0, 0):
            if any(c) and c != w:
                yield c

    # -- values

    def _val(self, w: tuple[int, ...]) -> int:
        hit = self.memo.get(w)
        if hit is not None:
            return hit
        if self._terminal(w):
            self.memo[w] = 0
            return 0
        floor = self._lower_bound(w) - 1
        best = None
        seen = set()
        for c in self._moves(w):
            rest = tuple(a - b for a, b in zip(w, c))
            key = (c, rest) if c <= rest else (rest, c)
            if key in seen:
                continue
            seen.add(key)
            a = self._val(c)
            if best is not None and a >= best:
                continue
            b = self._val(rest)
            m = a if a > b else b
            if best is None or m < best:
                best = m
                if best <= floor:
                    break
        if best is None:  # unreachable for T0 spaces
            raise GameError("nonterminal state with no splitting move")
        if len(self.memo) >= self.max_states:
            raise ResourceLimitError(
                f"memo table exceeded {self.max_states} states (TOPOGAMES_MAX_STATES)"
            )
        self.memo[w] = best + 1
        return best + 1

    def value(self, W: PointSet | None = None) -> int:
        """Least horizon at which the Seeker wins from state ``W`` (default: whole space)."""
        if W is None:
            W = self.X.full
        return self._val(self.counts(W))

    def seeker_wins(self, n: int, W: PointSet | None = None) -> bool:
        return self.value(W) <= n

    def ranked_moves(self, W: PointSet) -> list[tuple[tuple[int, int, PointSet], PointSet]]:
        """All nontrivial trace classes at ``W`` with their tie-break keys.

        Key is (worse branch value, larger branch size, trace mask); the
        trace is the lowest-mask member of its symmetry class.
        """
        w = self.counts(W)
        out = []
        for c in self._moves(w):
            rest = tuple(a - b for a, b in zip(w, c))
            t = self.realize(W, c)
            k_in, k_out = t.bit_count(), (W & ~t).bit_count()
            v = max(self._val(c), self._val(rest))
            out.append(((v, max(k_in, k_out), t), t))
        out.sort()
        return out

    def best_trace(self, W: PointSet) -> PointSet:
        if is_terminal(self.goal, W):
            return W
        return self.ranked_moves(W)[0][1]

    def best_move(self, W: PointSet) -> PointSet:
        """Optimal open set at ``W``: the minimal open with the chosen trace."""
        return self.X.up_closure(self.best_trace(W))

    def hider_reply(self, W: PointSet, U: PointSet) -> int:
        inside, outside = W & U, W & ~U
        a = (self.value(inside), inside.bit_count(), 1)
        b = (self.value(outside), outside.bit_count(), 0)
        return 1 if a > b else 0


def _lowest(mask: PointSet, k: int) -> PointSet:
    out = 0
    for _ in range(k):
        low = mask & -mask
        out |= low
        mask ^= low
    return out


# ---------------------------------------------------------------- public values


def value(X: FiniteSpace, goal: GameGoal = PS, max_states: int | None = None) -> int:
    return Solver(X, goal, max_states).value()


def ps_value(X: FiniteSpace) -> int:
    """Point-separating number."""
    return value(X, PS)


def sm_set(X: FiniteSpace, Y: PointSet) -> int:
    """Set-membership number of the target ``Y``."""
    return value(X, GameGoal(Y))


def target_orbits(X: FiniteSpace) -> list[PointSet]:
    """One target per class of ``Y`` under twin swaps and complementation.

    Each class is represented by its lowest members; a target is skipped
    when its complement's count vector is smaller.
    """
    classes = X.twin_classes
    sizes = [c.bit_count() for c in classes]
    out = []

    def rec(j: int, acc: list[int]) -> None:
        if j == len(classes):
            comp = [s - a for s, a in zip(sizes, acc)]
            if comp < acc:
                return
            out.append(sum(_lowest(c, k) for c, k in zip(classes, acc)))
            return
        for k in range(sizes[j] + 1):
            acc.append(k)
            rec(j + 1, acc)
            acc.pop()

    rec(0, [])
    return out


def sm_witness(X: FiniteSpace, max_targets: int = DEFAULT_MAX_TARGETS) -> tuple[int, PointSet]:
    """``sm(X)`` and the first target (in orbit order) attaining it."""
    targets = target_orbits(X)
    if len(targets) > max_targets:
        raise SizeCapError(
            f"{len(targets)} target classes exceed the cap of {max_targets}"
        )
    best, arg = 0, 0
    for Y in targets:
        v = sm_set(X, Y)
        if v > best:
            best, arg = v, Y
    return best, arg


def sm(X: FiniteSpace, max_targets: int = DEFAULT_MAX_TARGETS) -> int:
    """Set-membership number of the space: the maximum over all targets."""
    return sm_witness(X, max_targets)[0]


# ---------------------------------------------------------------- strategies


@dataclass(frozen=True)
class Strategy:
    """A deterministic playbook.

    For the Seeker ``rule(state) -> open set``; for the Hider
    ``rule(state, open set) -> bit``. ``bound`` is the number of rounds the
    strategy claims to win (Seeker) or survive (Hider), when known.
    """

    side: str
    space: FiniteSpace
    goal: GameGoal
    rule: Callable = field(compare=False)
    label: str = ""
    bound: int | None = None

    def move(self, W: PointSet) -> PointSet:
        assert self.side == "seeker"
        return self.rule(W)

    def reply(self, W: PointSet, U: PointSet) -> int:
        assert self.side == "hider"
        return self.rule(W, U)


def extract_seeker(X: FiniteSpace, goal: GameGoal = PS, solver: Solver | None = None) -> Strategy:
    """Optimal Seeker strategy; at terminal states it passes with the whole space."""
    solver = solver or Solver(X, goal)
    cache: dict[PointSet, PointSet] = {}

    def rule(W: PointSet) -> PointSet:
        if W not in cache:
            cache[W] = X.full if is_terminal(goal, W) else solver.best_move(W)
        return cache[W]

    return Strategy("seeker", X, goal, rule, "optimal", solver.value())


def extract_hider(X: FiniteSpace, goal: GameGoal, n: int, solver: Solver | None = None) -> Strategy:
    """Hider strategy surviving ``n`` rounds; requires ``n < value``."""
    solver = solver or Solver(X, goal)
    v = solver.value()
    if n >= v:
        raise HiderCannotWin(f"the Seeker wins within {v} <= {n} rounds")
    return Strategy("hider", X, goal, solver.hider_reply, "optimal", n)


# ---------------------------------------------------------------- transcripts


@dataclass(frozen=True)
class Round:
    U: PointSet
    i: int
    W: PointSet


@dataclass
class GameTranscript:
    space: FiniteSpace
    goal: GameGoal
    rounds: list[Round]
    outcome: PointSet
    winner: str

    def to_json(self) -> dict:
        names = self.space.names
        pick = lambda m: [names[x] for x in ps.iter_members(m)]  # noqa: E731
        out = {
            "goal": self.goal.kind,
            "rounds": [{"U": pick(r.U), "i": r.i, "W": pick(r.W)} for r in self.rounds],
            "outcome": pick(self.outcome),
            "winner": self.winner,
        }
        if self.goal.target is not None:
            out["target"] = pick(self.goal.target)
        return out


def winner_of(goal: GameGoal, W: PointSet) -> str:
    return "seeker" if is_terminal(goal, W) else "hider"


def make_transcript(X: FiniteSpace, goal: GameGoal, steps: list[tuple[PointSet, int]]) -> GameTranscript:
    W = X.full
    rounds = []
    for U, i in steps:
        W &= bracket(X, U, i)
        rounds.append(Round(U, i, W))
    return GameTranscript(X, goal, rounds, W, winner_of(goal, W))


def replay(t: GameTranscript) -> None:
    """Re-derive every state of ``t``; raise ``GameError`` on any inconsistency."""
    X = t.space
    W = X.full
    for k, r in enumerate(t.rounds):
        if not is_open(X, r.U):
            raise NonOpenMove(f"round {k}: {ps.fmt(r.U)} is not open")
        if r.i not in (0, 1):
            raise GameError(f"round {k}: reply must be 0 or 1")
        W &= bracket(X, r.U, r.i)
        if W != r.W:
            raise GameError(f"round {k}: recorded state {ps.fmt(r.W)} should be {ps.fmt(W)}")
    if W != t.outcome:
        raise GameError("outcome differs from the last state")
    if t.winner != winner_of(t.goal, W):
        raise GameError("winner inconsistent with the outcome")


def transcript_from_json(X: FiniteSpace, obj: dict) -> GameTranscript:
    idx = {name: i for i, name in enumerate(X.names)}
    mask = lambda names: ps.from_members(idx[str(p)] for p in names)  # noqa: E731
    goal = GameGoal(mask(obj["target"])) if obj.get("goal") == "sm" else PS
    rounds = [Round(mask(r["U"]), int(r["i"]), mask(r["W"])) for r in obj["rounds"]]
    return GameTranscript(X, goal, rounds, mask(obj["outcome"]), obj["winner"])


def play(seeker: Strategy, hider: Strategy, n: int) -> GameTranscript:
    """Play at most ``n`` rounds, stopping once the Seeker's condition holds."""
    X, goal = seeker.space, seeker.goal
    W = X.full
    steps = []
    for _ in range(n):
        if is_terminal(goal, W):
            break
        U = seeker.move(W)
        i = hider.reply(W, U)
        steps.append((U, i))
        W &= bracket(X, U, i)
    return make_transcript(X, goal, steps)


# ---------------------------------------------------------------- verification


def verify_strategy(X: FiniteSpace, goal: GameGoal, s: Strategy, n: int) -> InvariantReport:
    """Exhaustively check ``s`` against every opponent over ``n`` rounds.

    A Seeker strategy passes if every Hider reply sequence ends in a
    terminal state; a Hider strategy passes if every sequence of Seeker
    moves (one per distinct trace, empty and full included) leaves a
    nonterminal state. A failure carries the defeating play.
    """
    check_goal(X, goal)
    label = f"{s.side} {s.label or 'strategy'} within {n} rounds"
    report = InvariantReport(label, f"{goal.describe(X)} on n={X.n}")
    if s.side == "seeker":
        bad = _seeker_counterexample(X, goal, s, n)
    else:
        bad = _hider_counterexample(X, goal, s, n)
    if bad is None:
        report.record(True)
    else:
        report.record(False, {"transcript": make_transcript(X, goal, bad).to_json()})
    return report


def _seeker_counterexample(X, goal, s, n):
    safe: set[tuple[PointSet, int]] = set()

    def walk(W: PointSet, left: int, path: list) -> list | None:
        if is_terminal(goal, W):
            return None
        if left == 0:
            return path
        if (W, left) in safe:
            return None
        U = s.move(W)
        if not is_open(X, U):
            raise NonOpenMove(f"Seeker strategy played {ps.fmt(U)}, which is not open")
        for i in (1, 0):
            bad = walk(W & bracket(X, U, i), left - 1, path + [(U, i)])
            if bad is not None:
                return bad
        safe.add((W, left))
        return None

    return walk(X.full, n, [])


def _hider_counterexample(X, goal, s, n):
    safe: set[tuple[PointSet, int]] = set()

    def walk(W: PointSet, left: int, path: list) -> list | None:
        if is_terminal(goal, W):
            return path
        if left == 0 or (W, left) in safe:
            return None
        for t in traces(X, W):
            U = X.up_closure(t)
            i = s.reply(W, U)
            bad = walk(W & bracket(X, U, i), left - 1, path + [(U, i)])
            if bad is not None:
                return bad
        safe.add((W, left))
        return None

    return walk(X.full, n, [])


def reachable_states(s: Strategy, limit: int | None = None) -> list[PointSet]:
    """Nonterminal states the Seeker strategy can face, in discovery order."""
    X, goal = s.space, s.goal
    seen: list[PointSet] = []
    marked: set[PointSet] = set()
    frontier = [(X.full, 0)]
    while frontier:
        W, depth = frontier.pop(0)
        if W in marked or is_terminal(goal, W):
            continue
        if limit is not None and depth >= limit:
            continue
        marked.add(W)
        seen.append(W)
        U = s.move(W)
        frontier.append((W & U, depth + 1))
        frontier.append((W & ~U, depth + 1))
    return seen


def strategy_range(s: Strategy, limit: int | None = None) -> list[PointSet]:
    """Distinct open sets a Seeker strategy can emit over reachable states."""
    out: list[PointSet] = []
    for W in reachable_states(s, limit):
        U = s.move(W)
        if U not in out:
            out.append(U)
    return sorted(out)


def separates_all_pairs(n: int, family: list[PointSet]) -> bool:
    """Every pair of distinct points is split by some member."""
    cells = _cells(ps.full(n), family)
    return all(c.bit_count() <= 1 for c in cells)


def _cells(universe: PointSet, family: list[PointSet]) -> list[PointSet]:
    cells = [universe] if universe else []
    for A in family:
        nxt = []
        for c in cells:
            a, b = c & A, c & ~A
            if a:
                nxt.append(a)
            if b:
                nxt.append(b)
        cells = nxt
    return cells


def seeker_table(s: Strategy) -> list[dict]:
    """Serializable state -> move table over reachable states."""
    names = s.space.names
    pick = lambda m: [names[x] for x in ps.iter_members(m)]  # noqa: E731
    return [{"W": pick(W), "U": pick(s.move(W))} for W in reachable_states(s)]
