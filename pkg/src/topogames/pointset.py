"""Point sets as integer bitmasks.

Bit ``i`` of a mask is set iff point ``i`` is a member. Masks are plain
``int`` values, so union/intersection/difference are ``|``, ``&`` and
``& ~``; these helpers cover the rest.
"""

from __future__ import annotations

from collections.abc import Iterable, Iterator

PointSet = int


def full(n: int) -> PointSet:
    return (1 << n) - 1


def from_members(members: Iterable[int]) -> PointSet:
    mask = 0
    for i in members:
        if i < 0:
            raise IndexError(f"negative point index {i}")
        mask |= 1 << i
    return mask


def members(mask: PointSet) -> list[int]:
    return list(iter_members(mask))


def iter_members(mask: PointSet) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


def size(mask: PointSet) -> int:
    return mask.bit_count()


def complement(mask: PointSet, n: int) -> PointSet:
    return full(n) & ~mask


def is_subset(a: PointSet, b: PointSet) -> bool:
    return a & ~b == 0


def iter_subsets(mask: PointSet) -> Iterator[PointSet]:
    """All submasks of ``mask`` in increasing integer order."""
    sub = 0
    while True:
        yield sub
        if sub == mask:
            return
        sub = (sub - mask) & mask


def fmt(mask: PointSet, names: list[str] | None = None) -> str:
    items = members(mask)
    if names is not None:
        return "{" + ",".join(names[i] for i in items) + "}"
    return "{" + ",".join(map(str, items)) + "}"
