"""Finite T0 spaces represented by their specialization order.

Convention: ``x <= y`` means every open set containing ``x`` contains ``y``,
so the open sets are exactly the up-sets of the order and the closed sets
are the down-sets. ``min_open(x)`` is the up-set of ``x``.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator, Sequence
from functools import cached_property

from . import pointset as ps
from .pointset import PointSet

MAX_POINTS = 20


class SpaceError(ValueError):
    """Base class for invalid space input."""


class CycleError(SpaceError):
    """The closed relation is not antisymmetric (the space would not be T0)."""


class NotATopology(SpaceError):
    pass


class NotT0(SpaceError):
    pass


class NotAlexandrovConsistent(SpaceError):
    pass


class SizeCapError(SpaceError):
    pass


def _check_size(n: int, cap: int = MAX_POINTS) -> None:
    if n < 0:
        raise SpaceError(f"point count must be non-negative, got {n}")
    if n > cap:
        raise SizeCapError(f"{n} points exceeds the cap of {cap}")


class FiniteSpace:
    """An immutable finite T0 space.

    ``up[x]`` is the mask of ``{y : x <= y}`` (reflexive), ``down[x]`` the
    mask of ``{y : y <= x}``. Build instances with :func:`from_order`,
    :func:`from_opens` or the constructors in :mod:`topogames.constructions`.
    """

    def __init__(self, up: Sequence[PointSet], names: Sequence[str] | None = None):
        n = len(up)
        _check_size(n)
        self.n = n
        self.up = tuple(up)
        down = [0] * n
        for x in range(n):
            for y in ps.iter_members(self.up[x]):
                down[y] |= 1 << x
        self.down = tuple(down)
        if names is None:
            names = [str(i) for i in range(n)]
        if len(names) != n:
            raise SpaceError(f"expected {n} point names, got {len(names)}")
        self.names = list(names)

    def __repr__(self) -> str:
        return f"FiniteSpace(n={self.n}, le={self.cover_pairs()})"

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, FiniteSpace):
            return NotImplemented
        return self.up == other.up

    def __hash__(self) -> int:
        return hash(self.up)

    @property
    def full(self) -> PointSet:
        return ps.full(self.n)

    def leq(self, x: int, y: int) -> bool:
        return bool(self.up[x] >> y & 1)

    def min_open(self, x: int) -> PointSet:
        return self.up[x]

    def up_closure(self, s: PointSet) -> PointSet:
        out = 0
        for x in ps.iter_members(s):
            out |= self.up[x]
        return out

    def down_closure(self, s: PointSet) -> PointSet:
        out = 0
        for x in ps.iter_members(s):
            out |= self.down[x]
        return out

    def pairs(self) -> list[tuple[int, int]]:
        """All strict relations ``x < y``."""
        return [
            (x, y)
            for x in range(self.n)
            for y in ps.iter_members(self.up[x])
            if y != x
        ]

    def cover_pairs(self) -> list[tuple[int, int]]:
        """Transitive reduction of the strict order."""
        out = []
        for x in range(self.n):
            above = self.up[x] & ~(1 << x)
            for y in ps.iter_members(above):
                between = above & self.down[y] & ~(1 << y)
                if not between:
                    out.append((x, y))
        return out

    def linear_extension(self) -> list[int]:
        """Points ordered so that ``x < y`` implies ``x`` comes first."""
        return sorted(range(self.n), key=lambda x: (self.down[x].bit_count(), x))

    def iter_opens(self) -> Iterator[PointSet]:
        """Every up-set, each exactly once."""
        order = self.linear_extension()[::-1]

        def rec(k: int, acc: PointSet) -> Iterator[PointSet]:
            if k == len(order):
                yield acc
                return
            x = order[k]
            yield from rec(k + 1, acc)
            if ps.is_subset(self.up[x] & ~(1 << x), acc):
                yield from rec(k + 1, acc | 1 << x)

        yield from rec(0, 0)

    @cached_property
    def opens(self) -> list[PointSet]:
        return sorted(self.iter_opens())

    @cached_property
    def maximal_points(self) -> PointSet:
        return ps.from_members(x for x in range(self.n) if self.up[x] == 1 << x)

    @cached_property
    def twin_classes(self) -> tuple[PointSet, ...]:
        """Classes of pairwise incomparable points with identical relations
        to every other point. Swapping two twins is an automorphism."""
        return twin_partition(self, [0] * self.n)


def twin_partition(X: FiniteSpace, colors: Sequence[int]) -> tuple[PointSet, ...]:
    """Twin classes refined by ``colors``; classes listed by lowest member.

    Equal strict up-sets and strict down-sets force incomparability, so the
    grouping key alone decides twinhood.
    """
    buckets: dict[tuple, PointSet] = {}
    for x in range(X.n):
        bit = 1 << x
        key = (colors[x], X.up[x] & ~bit, X.down[x] & ~bit)
        buckets[key] = buckets.get(key, 0) | bit
    return tuple(sorted(buckets.values(), key=lambda m: m & -m))


# ---------------------------------------------------------------- constructors


def from_order(n: int, pairs: Iterable[tuple[int, int]], names: Sequence[str] | None = None) -> FiniteSpace:
    """The space whose order is the reflexive-transitive closure of ``pairs``."""
    _check_size(n)
    up = [1 << x for x in range(n)]
    for a, b in pairs:
        if not (0 <= a < n and 0 <= b < n):
            raise IndexError(f"pair ({a}, {b}) out of range for {n} points")
        up[a] |= 1 << b
    for k in range(n):
        for x in range(n):
            if up[x] >> k & 1:
                up[x] |= up[k]
    for x in range(n):
        for y in ps.iter_members(up[x]):
            if y != x and up[y] >> x & 1:
                raise CycleError(f"points {x} and {y} are mutually related")
    return FiniteSpace(up, names)


def from_opens(n: int, opens: Iterable[PointSet | Iterable[int]], names: Sequence[str] | None = None) -> FiniteSpace:
    """Build a space from its complete list of open sets."""
    _check_size(n)
    family = set()
    for o in opens:
        mask = o if isinstance(o, int) else ps.from_members(o)
        if mask >> n:
            raise IndexError(f"open set {ps.fmt(mask)} has points outside 0..{n - 1}")
        family.add(mask)
    top = ps.full(n)
    if 0 not in family or top not in family:
        raise NotATopology("the empty set and the whole space must be open")
    fam = sorted(family)
    for i, a in enumerate(fam):
        for b in fam[i + 1:]:
            if a | b not in family:
                raise NotATopology(f"union {ps.fmt(a | b)} of open sets is missing")
            if a & b not in family:
                raise NotATopology(f"intersection {ps.fmt(a & b)} of open sets is missing")
    up = []
    for x in range(n):
        m = top
        for o in fam:
            if o >> x & 1:
                m &= o
        up.append(m)
    for x in range(n):
        for y in range(x + 1, n):
            if up[x] == up[y]:
                raise NotT0(f"points {x} and {y} are topologically indistinguishable")
    X = FiniteSpace(up, names)
    if set(X.iter_opens()) != family:
        raise NotAlexandrovConsistent("the given opens are not the up-sets of their specialization order")
    return X


# ---------------------------------------------------------------- topology


def interior(X: FiniteSpace, s: PointSet) -> PointSet:
    return ps.from_members(x for x in range(X.n) if ps.is_subset(X.up[x], s))


def closure(X: FiniteSpace, s: PointSet) -> PointSet:
    return X.down_closure(s)


def is_open(X: FiniteSpace, s: PointSet) -> bool:
    return X.up_closure(s) == s


def is_closed(X: FiniteSpace, s: PointSet) -> bool:
    return X.down_closure(s) == s


def is_dense(X: FiniteSpace, s: PointSet) -> bool:
    return closure(X, s) == X.full


def is_discrete(X: FiniteSpace) -> bool:
    return all(X.up[x] == 1 << x for x in range(X.n))


def isolated_points(X: FiniteSpace) -> PointSet:
    """Points whose singleton is open, i.e. the maximal elements."""
    return X.maximal_points


def is_door(X: FiniteSpace) -> bool:
    """Every subset is open or closed (exhaustive)."""
    return all(is_open(X, s) or is_closed(X, s) for s in ps.iter_subsets(X.full))


def is_resolvable(X: FiniteSpace) -> bool:
    """Whether ``X`` splits into two disjoint dense sets.

    Supersets of dense sets are dense, so it suffices to look for a
    partition; fixing point 0 on one side halves the search. The empty
    space is treated as not resolvable.
    """
    if X.n == 0:
        return False
    top = X.full
    rest = top & ~1
    for sub in ps.iter_subsets(rest):
        s = sub | 1
        if is_dense(X, s) and is_dense(X, top & ~s):
            return True
    return False


# ---------------------------------------------------------------- canonical form


def _refine(colors: list[int], ups: list[int], downs: list[int]) -> list[int]:
    m = len(colors)
    while True:
        sigs = []
        for i in range(m):
            above = sorted(colors[j] for j in ps.iter_members(ups[i]))
            below = sorted(colors[j] for j in ps.iter_members(downs[i]))
            sigs.append((colors[i], tuple(above), tuple(below)))
        rank = {s: r for r, s in enumerate(sorted(set(sigs)))}
        new = [rank[s] for s in sigs]
        if len(rank) == len(set(colors)):
            return new
        colors = new


def _encode(order: list[int], sizes: list[int], ups: list[int]) -> tuple:
    pos = {v: k for k, v in enumerate(order)}
    rows = tuple(
        sum(1 << pos[j] for j in ps.iter_members(ups[v])) for v in order
    )
    return (tuple(sizes[v] for v in order), rows)


def _canon_search(colors: list[int], sizes: list[int], ups: list[int], downs: list[int]) -> tuple:
    colors = _refine(colors, ups, downs)
    m = len(colors)
    if len(set(colors)) == m:
        order = sorted(range(m), key=colors.__getitem__)
        return _encode(order, sizes, ups)
    counts: dict[int, int] = {}
    for c in colors:
        counts[c] = counts.get(c, 0) + 1
    target = min((k, c) for c, k in counts.items() if k > 1)[1]
    best = None
    for v in range(m):
        if colors[v] != target:
            continue
        split = [2 * c + (0 if i == v or c != target else 1) for i, c in enumerate(colors)]
        code = _canon_search(split, sizes, ups, downs)
        if best is None or code < best:
            best = code
    return best


def canonical_code(X: FiniteSpace) -> bytes:
    """Isomorphism-invariant key: equal iff the orders are isomorphic.

    Twin classes are collapsed first (they are interchangeable), then the
    quotient order with class sizes as vertex colors is canonically
    labeled by color refinement plus individualization.
    """
    classes = list(X.twin_classes)
    m = len(classes)
    reps = [c & -c for c in classes]
    index = {}
    for i, c in enumerate(classes):
        for x in ps.iter_members(c):
            index[x] = i
    ups, downs = [0] * m, [0] * m
    for i, r in enumerate(reps):
        x = r.bit_length() - 1
        for y in ps.iter_members(X.up[x] & ~r):
            ups[i] |= 1 << index[y]
        for y in ps.iter_members(X.down[x] & ~r):
            downs[i] |= 1 << index[y]
    sizes = [c.bit_count() for c in classes]
    colors = [0] * m
    for i in range(m):
        colors[i] = sizes[i]
    if m == 0:
        enc: tuple = ((), ())
    else:
        enc = _canon_search(colors, sizes, ups, downs)
    sizes_part = ".".join(map(str, enc[0]))
    rows_part = ".".join(format(r, "x") for r in enc[1])
    return f"{X.n}:{sizes_part}:{rows_part}".encode()


# ---------------------------------------------------------------- JSON format


def to_json(X: FiniteSpace) -> dict:
    names = X.names
    return {
        "points": list(names),
        "le": [[names[a], names[b]] for a, b in X.cover_pairs()],
    }


def from_json(obj: dict) -> FiniteSpace:
    """Parse ``{"points": [...], "le": [[a, b], ...]}`` or ``{"points": [...], "opens": [[...], ...]}``."""
    if not isinstance(obj, dict) or "points" not in obj:
        raise SpaceError('space JSON needs a "points" list')
    has_le, has_opens = "le" in obj, "opens" in obj
    if has_le == has_opens:
        raise SpaceError('space JSON needs exactly one of "le" or "opens"')
    names = [str(p) for p in obj["points"]]
    if len(set(names)) != len(names):
        raise SpaceError("duplicate point names")
    idx = {name: i for i, name in enumerate(names)}

    def lookup(name) -> int:
        try:
            return idx[str(name)]
        except KeyError:
            raise SpaceError(f"unknown point {name!r}") from None

    if has_le:
        pairs = []
        for entry in obj["le"]:
            if len(entry) != 2:
                raise SpaceError(f"le entry {entry!r} is not a pair")
            pairs.append((lookup(entry[0]), lookup(entry[1])))
        return from_order(len(names), pairs, names)
    opens = [ps.from_members(lookup(p) for p in o) for o in obj["opens"]]
    return from_opens(len(names), opens, names)
