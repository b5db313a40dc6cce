import pytest
from conftest import mask, space_and_subset, spaces
from hypothesis import given, settings
from hypothesis import strategies as st

from topogames import game
from topogames.constructions import chain, corpus, discrete, sierpinski
from topogames.game import (
    PS,
    HiderCannotWin,
    NonOpenMove,
    ResourceLimitError,
    Solver,
    Strategy,
    bracket,
    extract_hider,
    extract_seeker,
    is_terminal,
    log2ceil,
    make_transcript,
    membership,
    play,
    ps_value,
    replay,
    sm,
    sm_set,
    strategy_range,
    trace,
    transcript_from_json,
    traces,
    value,
    verify_strategy,
)
from topogames.oracle import naive_value
from topogames.space import from_order, is_open


def test_bracket_examples():
    S = sierpinski()
    assert bracket(S, mask(1), 1) == mask(1)
    assert bracket(S, mask(1), 0) == mask(0)
    assert bracket(S, 0, 0) == S.full


def test_trace_examples():
    assert trace(sierpinski(), [mask(1)], [1]) == mask(1)
    assert trace(chain(3), [mask(2), mask(1, 2)], [0, 1]) == mask(1)
    assert trace(chain(3), [], []) == mask(0, 1, 2)
    with pytest.raises(ValueError):
        trace(chain(3), [mask(2)], [])


def test_is_terminal_examples():
    Y = membership(mask(0, 2))
    assert is_terminal(PS, 0)
    assert is_terminal(Y, mask(1))
    assert not is_terminal(Y, mask(0, 1))


def test_value_examples():
    assert ps_value(sierpinski()) == 1 == naive_value(sierpinski())
    assert ps_value(discrete(4)) == 2 == naive_value(discrete(4))
    assert sm_set(chain(3), mask(0, 2)) == 2 == naive_value(chain(3), mask(0, 2))


def test_sm_examples():
    assert sm(discrete(4)) == 1
    assert sm(sierpinski()) == 1
    assert max(naive_value(sierpinski(), Y) for Y in range(4)) == 1
    assert sm(chain(3)) == 2
    assert max(naive_value(chain(3), Y) for Y in range(8)) == 2


def test_empty_space_values():
    assert ps_value(discrete(0)) == 0 and sm(discrete(0)) == 0


def test_traces_are_distinct_intersections():
    X = from_order(4, [(0, 1), (0, 2), (1, 3)])
    for W in range(16):
        assert traces(X, W) == sorted({U & W for U in X.opens})


def test_extract_seeker_discrete2_asks_lowest_singleton():
    s = extract_seeker(discrete(2))
    assert s.move(mask(0, 1)) == mask(0)


def test_extract_hider_discrete4_takes_larger_half():
    X = discrete(4)
    h = extract_hider(X, PS, 1)
    for U in X.opens:
        k = U.bit_count()
        if k != 2:
            assert h.reply(X.full, U) == (1 if k > 2 else 0)
    assert verify_strategy(X, PS, h, 1).ok


def test_extract_hider_refuses_when_seeker_wins():
    with pytest.raises(HiderCannotWin):
        extract_hider(chain(3), membership(mask(0, 2)), 2)


def test_verify_examples():
    X = discrete(4)
    s = extract_seeker(X)
    assert verify_strategy(X, PS, s, 2).ok
    rep = verify_strategy(X, PS, s, 1)
    assert not rep.ok and rep.failed == 1
    t = transcript_from_json(X, rep.counterexamples[0]["transcript"])
    replay(t)
    assert t.winner == "hider" and len(t.rounds) == 1


def test_verify_rejects_non_open_move():
    X = chain(3)
    bad = Strategy("seeker", X, PS, lambda W: mask(0))
    with pytest.raises(NonOpenMove):
        verify_strategy(X, PS, bad, 2)


def test_strategy_range_examples():
    assert len(strategy_range(extract_seeker(discrete(2)))) == 1
    assert len(strategy_range(extract_seeker(discrete(4)))) <= 3
    rng = strategy_range(extract_seeker(chain(3)))
    assert game.separates_all_pairs(3, rng)


def test_log2ceil_examples():
    assert [log2ceil(m) for m in (0, 1, 2, 4, 5)] == [0, 0, 1, 2, 3]
    with pytest.raises(ValueError):
        log2ceil(-1)


def test_oracle_agreement_small_corpus(corpus3):
    for X in corpus3:
        assert ps_value(X) == naive_value(X)
        for Y in range(1 << X.n):
            assert sm_set(X, Y) == naive_value(X, Y)


def test_resource_limit():
    with pytest.raises(ResourceLimitError):
        value(discrete(6), max_states=1)
    X = from_order(6, [(0, 1), (1, 2), (0, 3), (3, 4), (4, 5)])
    with pytest.raises(ResourceLimitError):
        value(X, max_states=2)


def test_resource_limit_from_env(monkeypatch):
    monkeypatch.setenv("TOPOGAMES_MAX_STATES", "1")
    with pytest.raises(ResourceLimitError):
        Solver(chain(4)).value()


@given(space_and_subset())
@settings(max_examples=60)
def test_complement_symmetry(arg):
    X, Y = arg
    assert sm_set(X, Y) == sm_set(X, X.full & ~Y)


@given(space_and_subset(), st.data())
@settings(max_examples=60)
def test_value_monotone_in_state(arg, data):
    X, W = arg
    sub = data.draw(st.integers(0, (1 << X.n) - 1)) & W
    s = Solver(X)
    assert s.value(sub) <= s.value(W)


@given(space_and_subset())
@settings(max_examples=40)
def test_horizon_monotone_and_determined(arg):
    X, Y = arg
    goal = membership(Y)
    solver = Solver(X, goal)
    v = solver.value()
    for n in range(v + 2):
        assert solver.seeker_wins(n) == (n >= v)
        if n >= v:
            assert verify_strategy(X, goal, extract_seeker(X, goal, solver), n).ok
        else:
            assert verify_strategy(X, goal, extract_hider(X, goal, n, solver), n).ok


@given(spaces(max_n=5))
@settings(max_examples=30)
def test_extracted_seeker_plays_open_and_wins(X):
    s = extract_seeker(X)
    assert all(is_open(X, U) for U in strategy_range(s))
    assert verify_strategy(X, PS, s, s.bound).ok


@given(spaces(min_n=1, max_n=5))
@settings(max_examples=30)
def test_transcript_round_trip(X):
    solver = Solver(X)
    v = solver.value()
    if v == 0:
        return
    t = play(extract_seeker(X, PS, solver), extract_hider(X, PS, v - 1, solver), v)
    replay(t)
    assert t.winner == "seeker" and len(t.rounds) == v
    back = transcript_from_json(X, t.to_json())
    assert back.rounds == t.rounds and back.outcome == t.outcome


def test_replay_detects_tampering():
    X = sierpinski()
    t = make_transcript(X, PS, [(mask(1), 1)])
    replay(t)
    t.rounds[0] = game.Round(mask(1), 1, mask(0))
    with pytest.raises(game.GameError):
        replay(t)


def test_ps_at_least_log_on_corpus():
    for X in corpus(4):
        assert ps_value(X) >= log2ceil(X.n)
