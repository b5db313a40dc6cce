"""Acceptance criteria 1-8, each printing one PASS/FAIL line."""

from __future__ import annotations

import time

import pytest

from topogames import cli
from topogames.constructions import corpus, discrete, enumerate_t0
from topogames.game import GameGoal, PS, Solver, is_terminal, log2ceil, ps_value, sm, sm_set
from topogames.invariants import (
    check_composition_theorems,
    check_core_chain,
    check_determinacy,
    check_monotonicity,
    check_strategies,
    psw0,
)
from topogames.oracle import count_t0_topologies, naive_value
from topogames.space import canonical_code


@pytest.fixture
def report(capsys):
    def emit(number: int, title: str, ok: bool, detail: str) -> None:
        with capsys.disabled():
            print(f"\ncriterion {number} {'PASS' if ok else 'FAIL'}: {title} ({detail})")
        assert ok, f"criterion {number} failed: {detail}"

    return emit


def test_1_discrete_exact_values(report):
    t = time.perf_counter()
    bad = []
    for m in range(1, 17):
        D = discrete(m)
        got = (ps_value(D), sm(D), psw0(D))
        want = (log2ceil(m), 1 if m >= 2 else 0, log2ceil(m))
        if got != want:
            bad.append((m, got, want))
    dt = time.perf_counter() - t
    report(1, "discrete(1..16) exact ps, sm, psw0", not bad and dt < 5, f"{len(bad)} mismatches, {dt:.2f}s < 5s")


def test_2_core_chain(report):
    t = time.perf_counter()
    sizes = [sum(1 for _ in enumerate_t0(n)) for n in range(1, 6)]
    oracle = [len({canonical_code(X) for X in enumerate_t0(n, "labeled", cap=5)}) for n in range(1, 6)]
    labeled3 = sum(1 for _ in enumerate_t0(3, "labeled"))
    counts_ok = sizes == oracle == [1, 2, 5, 16, 63] and labeled3 == count_t0_topologies(3) == 19
    rep = check_core_chain(corpus(5))
    dt = time.perf_counter() - t
    ok = counts_ok and rep.ok and rep.passed == 87 and dt < 120
    report(2, "sm <= ps <= psw0, ps >= log2ceil n, psw0 <= 2^ps - 1, range separates", ok,
           f"corpus sizes {sizes}, labeled n=3 {labeled3}, {rep.passed} passed, {rep.failed} failed, {dt:.1f}s < 120s")


def test_3_composition(report):
    t = time.perf_counter()
    small = corpus(3)
    rep = check_composition_theorems([(a, b) for a in small for b in small])
    dt = time.perf_counter() - t
    ok = rep.ok and rep.passed == 64 and dt < 60
    report(3, "sum and product bounds over n <= 3 pairs", ok, f"{rep.passed} passed, {rep.failed} failed, {dt:.1f}s < 60s")


def test_4_strategy_validation(report):
    small = corpus(3)
    rep = check_strategies(corpus(4), [(a, b) for a in small for b in small])
    report(4, "every construction wins at its stated bound", rep.ok and rep.passed > 0,
           f"{rep.passed} verified, {rep.failed} failed")


def test_5_determinacy(report):
    rep = check_determinacy(corpus(5), trials=200, seed=0)
    report(5, "exactly one side wins at each sampled horizon", rep.ok and rep.passed == 400,
           f"200 seeded triples x 2 goals: {rep.passed} passed, {rep.failed} failed")


def test_6_oracle_equivalence(report):
    t = time.perf_counter()
    checked, bad = 0, []
    for n in range(0, 4):
        for X in enumerate_t0(n, "labeled"):
            if Solver(X, PS).value() != naive_value(X):
                bad.append((X.up, None))
            for Y in range(1 << n):
                checked += 1
                if sm_set(X, Y) != naive_value(X, Y):
                    bad.append((X.up, Y))
    dt = time.perf_counter() - t
    report(6, "memoized value equals naive minimax, all labeled n <= 3", not bad and dt < 30,
           f"{checked} targets, {len(bad)} mismatches, {dt:.2f}s < 30s")


def test_7_monotonicity(report):
    spaces = corpus(5)
    rep = check_monotonicity(spaces, samples=1000, seed=0)
    # absorption along every move: a terminal state stays terminal under any open
    absorbed = all(
        is_terminal(g, W & U) and is_terminal(g, W & ~U)
        for X in corpus(3)
        for g in [PS, *(GameGoal(Y) for Y in range(1 << X.n))]
        for W in range(1 << X.n)
        if is_terminal(g, W)
        for U in X.opens
    )
    report(7, "absorption and val(W') <= val(W)", rep.ok and rep.passed == 1000 and absorbed,
           f"{rep.passed} passed, {rep.failed} failed, exhaustive absorption n <= 3: {absorbed}")


def test_8_determinism(report, tmp_path, capsys):
    outs = []
    for k in range(2):
        p = tmp_path / f"run{k}.json"
        code = cli.main(["verify", "--suite", "all", "--max-n", "5", "--seed", "11", "--output", str(p)])
        outs.append((code, p.read_bytes()))
    capsys.readouterr()
    same = outs[0][1] == outs[1][1]
    report(8, "identical seed and config give byte-identical reports", same and outs[0][0] == 0,
           f"{len(outs[0][1])} bytes, identical={same}")
