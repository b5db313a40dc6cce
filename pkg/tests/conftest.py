from __future__ import annotations

import itertools

import pytest
from hypothesis import strategies as st

from topogames.constructions import chain, corpus, discrete, sierpinski
from topogames.space import FiniteSpace, from_order


@pytest.fixture(scope="session")
def corpus5() -> list[FiniteSpace]:
    return corpus(5)


@pytest.fixture(scope="session")
def corpus3() -> list[FiniteSpace]:
    return corpus(3)


@pytest.fixture
def S() -> FiniteSpace:
    return sierpinski()


@pytest.fixture
def C3() -> FiniteSpace:
    return chain(3)


@pytest.fixture
def D4() -> FiniteSpace:
    return discrete(4)


def mask(*points: int) -> int:
    out = 0
    for p in points:
        out |= 1 << p
    return out


def brute_upsets(X: FiniteSpace) -> list[int]:
    """Up-sets found by testing every subset against every strict relation."""
    rel = X.pairs()
    return [
        s
        for s in range(1 << X.n)
        if all(not (s >> x & 1) or (s >> y & 1) for x, y in rel)
    ]


def relabel(X: FiniteSpace, perm: list[int]) -> FiniteSpace:
    """Copy of ``X`` with point ``x`` renamed ``perm[x]``."""
    return from_order(X.n, [(perm[x], perm[y]) for x, y in X.pairs()])


def isomorphic(a: FiniteSpace, b: FiniteSpace) -> bool:
    if a.n != b.n:
        return False
    pa = set(a.pairs())
    pb = set(b.pairs())
    if len(pa) != len(pb):
        return False
    return any(
        {(p[x], p[y]) for x, y in pa} == pb for p in itertools.permutations(range(a.n))
    )


@st.composite
def spaces(draw, min_n: int = 0, max_n: int = 6) -> FiniteSpace:
    """Random finite T0 space: a random DAG on a random labeling."""
    n = draw(st.integers(min_n, max_n))
    pairs = [
        (i, j)
        for i in range(n)
        for j in range(i + 1, n)
        if draw(st.booleans())
    ]
    perm = draw(st.permutations(list(range(n))))
    return from_order(n, [(perm[i], perm[j]) for i, j in pairs])


@st.composite
def space_and_subset(draw, min_n: int = 0, max_n: int = 6):
    X = draw(spaces(min_n, max_n))
    s = draw(st.integers(0, (1 << X.n) - 1))
    return X, s
