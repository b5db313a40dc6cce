"""Standard finite spaces, sums, products, subspaces and corpus enumeration."""

from __future__ import annotations

from collections.abc import Iterator, Sequence
from dataclasses import dataclass

from . import pointset as ps
from .pointset import PointSet
from .space import MAX_POINTS, FiniteSpace, SizeCapError, SpaceError, canonical_code, from_order

LABELED_CAP = 4
UP_TO_ISO_CAP = 6


def discrete(m: int) -> FiniteSpace:
    if m < 0:
        raise SpaceError("discrete space needs m >= 0")
    return FiniteSpace([1 << x for x in range(m)])


def chain(m: int) -> FiniteSpace:
    """Total order 0 < 1 < ... < m-1."""
    if m < 1:
        raise SpaceError("chain needs m >= 1")
    return from_order(m, [(x, x + 1) for x in range(m - 1)])


def point() -> FiniteSpace:
    return discrete(1)


def sierpinski() -> FiniteSpace:
    return chain(2)


@dataclass(frozen=True)
class SpaceFamily:
    """A topological sum with its summand bookkeeping.

    Summand ``i`` occupies global points ``offsets[i] .. offsets[i] + parts[i].n - 1``.
    """

    parts: tuple[FiniteSpace, ...]
    offsets: tuple[int, ...]
    space: FiniteSpace

    @property
    def k(self) -> int:
        return len(self.parts)

    def block(self, i: int) -> PointSet:
        return ps.full(self.parts[i].n) << self.offsets[i]

    def lift(self, i: int, local: PointSet) -> PointSet:
        return local << self.offsets[i]

    def restrict(self, i: int, s: PointSet) -> PointSet:
        return (s >> self.offsets[i]) & ps.full(self.parts[i].n)

    def locate(self, x: int) -> tuple[int, int]:
        """Global point -> (summand index, local index)."""
        for i in range(self.k - 1, -1, -1):
            if x >= self.offsets[i]:
                return i, x - self.offsets[i]
        raise IndexError(x)


def sum_family(parts: Sequence[FiniteSpace]) -> SpaceFamily:
    if not parts:
        raise SpaceError("a sum needs at least one summand")
    total = sum(p.n for p in parts)
    if total > MAX_POINTS:
        raise SizeCapError(f"sum has {total} points, cap is {MAX_POINTS}")
    up, names, offsets = [], [], []
    off = 0
    for i, p in enumerate(parts):
        offsets.append(off)
        up.extend(u << off for u in p.up)
        names.extend(f"{i}.{name}" for name in p.names)
        off += p.n
    return SpaceFamily(tuple(parts), tuple(offsets), FiniteSpace(up, names))


def topological_sum(parts: Sequence[FiniteSpace]) -> FiniteSpace:
    return sum_family(parts).space


def product(a: FiniteSpace, b: FiniteSpace) -> FiniteSpace:
    """Componentwise order; point ``(x, y)`` has index ``x * b.n + y``."""
    total = a.n * b.n
    if total > MAX_POINTS:
        raise SizeCapError(f"product has {total} points, cap is {MAX_POINTS}")
    up = []
    for x in range(a.n):
        for y in range(b.n):
            mask = 0
            for x2 in ps.iter_members(a.up[x]):
                mask |= b.up[y] << (x2 * b.n)
            up.append(mask)
    names = [f"({p},{q})" for p in a.names for q in b.names]
    return FiniteSpace(up, names)


def cylinder_first(a: FiniteSpace, b: FiniteSpace, h: PointSet) -> PointSet:
    """Preimage of ``h`` under the first projection of ``a x b``."""
    row = ps.full(b.n)
    return sum(row << (x * b.n) for x in ps.iter_members(h))


def cylinder_second(a: FiniteSpace, b: FiniteSpace, h: PointSet) -> PointSet:
    """Preimage of ``h`` under the second projection of ``a x b``."""
    return sum(h << (x * b.n) for x in range(a.n))


def project_first(a: FiniteSpace, b: FiniteSpace, s: PointSet) -> PointSet:
    row = ps.full(b.n)
    return ps.from_members(x for x in range(a.n) if (s >> (x * b.n)) & row)


def project_second(a: FiniteSpace, b: FiniteSpace, s: PointSet) -> PointSet:
    row = ps.full(b.n)
    out = 0
    for x in range(a.n):
        out |= (s >> (x * b.n)) & row
    return out


def subspace(X: FiniteSpace, A: PointSet) -> FiniteSpace:
    """Induced order on ``A``; points are renumbered in increasing order."""
    if A >> X.n:
        raise IndexError("subset has points outside the space")
    keep = ps.members(A)
    pos = {x: i for i, x in enumerate(keep)}
    up = []
    for x in keep:
        up.append(ps.from_members(pos[y] for y in ps.iter_members(X.up[x] & A)))
    return FiniteSpace(up, [X.names[x] for x in keep])


# ---------------------------------------------------------------- enumeration


def _upsets(up: Sequence[PointSet]) -> list[PointSet]:
    return FiniteSpace(up).opens


def _labeled(n: int) -> Iterator[tuple[PointSet, ...]]:
    if n == 0:
        yield ()
        return
    k = n - 1
    for base in _labeled(k):
        ups = _upsets(base)
        top = ps.full(k)
        for below_open in ups:
            below = top & ~below_open  # strict down-set of the new point
            allowed = top
            for d in ps.iter_members(below):
                allowed &= base[d] & ~(1 << d)
            for above in ups:
                if not ps.is_subset(above, allowed):
                    continue
                new = [u | (1 << k) if below >> d & 1 else u for d, u in enumerate(base)]
                new.append(above | 1 << k)
                yield tuple(new)


def _iso_levels(n: int) -> Iterator[FiniteSpace]:
    level: list[tuple[PointSet, ...]] = [()]
    for k in range(n):
        seen: set[bytes] = set()
        nxt = []
        last = k == n - 1
        for base in level:
            top = ps.full(k)
            for down_open in _upsets(base):
                below = top & ~down_open  # strict down-set of a new maximal point
                new = tuple(u | (1 << k) if below >> d & 1 else u for d, u in enumerate(base)) + (1 << k,)
                X = FiniteSpace(new)
                code = canonical_code(X)
                if code in seen:
                    continue
                seen.add(code)
                if last:
                    yield X
                else:
                    nxt.append(new)
        level = nxt
    if n == 0:
        yield FiniteSpace(())


def enumerate_t0(n: int, mode: str = "up_to_iso", *, cap: int | None = None) -> Iterator[FiniteSpace]:
    """Stream finite T0 spaces on ``n`` points.

    ``labeled`` yields every partial order on ``0..n-1`` exactly once, built
    by adding one point at a time with a compatible down-set and up-set.
    ``up_to_iso`` yields one representative per isomorphism class, grown by
    adjoining a maximal point to each class of size ``n - 1``.
    """
    if mode == "labeled":
        limit = LABELED_CAP if cap is None else cap
        if n > limit:
            raise SizeCapError(f"labeled enumeration capped at n <= {limit}")
        return (FiniteSpace(up) for up in _labeled(n))
    if mode == "up_to_iso":
        limit = UP_TO_ISO_CAP if cap is None else cap
        if n > limit:
            raise SizeCapError(f"up-to-isomorphism enumeration capped at n <= {limit}")
        return _iso_levels(n)
    raise ValueError(f"unknown enumeration mode {mode!r}")


def corpus(max_n: int, min_n: int = 1) -> list[FiniteSpace]:
    """All T0 spaces up to isomorphism with ``min_n <= n <= max_n``."""
    out: list[FiniteSpace] = []
    for n in range(min_n, max_n + 1):
        out.extend(enumerate_t0(n, "up_to_iso", cap=max(max_n, UP_TO_ISO_CAP)))
    return out
