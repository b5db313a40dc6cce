"""Exact T0-pseudoweight and the corpus-wide theorem checks."""

from __future__ import annotations

import random
import time
from collections.abc import Callable, Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor

from . import game
from .constructions import corpus, discrete, product, sum_family, topological_sum
from .game import (
    PS,
    GameGoal,
    HiderCannotWin,
    Solver,
    extract_hider,
    extract_seeker,
    is_terminal,
    log2ceil,
    separates_all_pairs,
    strategy_range,
    verify_strategy,
)
from .pointset import PointSet, iter_subsets
from .report import InvariantReport
from .space import FiniteSpace, canonical_code, interior, is_closed, is_discrete, is_door, to_json
from .strategies import (
    Inapplicable,
    binary_coding_family,
    column_elimination_seeker,
    product_seeker,
    sequential_separating_seeker,
    sum_membership_seeker,
    sum_seeker,
    two_move_membership,
)

# ---------------------------------------------------------------- pseudoweight


def _score(cells: list[PointSet], U: PointSet) -> int:
    return sum((c & U).bit_count() * (c & ~U).bit_count() for c in cells)


def _split(cells: list[PointSet], U: PointSet) -> list[PointSet]:
    out = []
    for c in cells:
        for part in (c & U, c & ~U):
            if part.bit_count() > 1:
                out.append(part)
    return out


def greedy_separating_opens(X: FiniteSpace) -> list[PointSet]:
    """Repeatedly take the open set splitting the most still-unsplit pairs."""
    cands = [U for U in X.opens if 0 < U < X.full]
    cells = [X.full] if X.n > 1 else []
    fam: list[PointSet] = []
    while cells:
        ceiling = sum((c.bit_count() // 2) * ((c.bit_count() + 1) // 2) for c in cells)
        best, arg = 0, None
        for U in cands:
            s = _score(cells, U)
            if s > best:
                best, arg = s, U
                if s == ceiling:
                    break
        fam.append(arg)
        cells = _split(cells, arg)
    return fam


def psw0_witness(X: FiniteSpace) -> list[PointSet]:
    """A minimum family of open sets splitting every pair of points.

    Branch and bound over distinct nontrivial opens in increasing mask
    order, trying sizes from ``log2ceil(n)`` up to the greedy size; the
    first family found is the lexicographically least of minimum size.
    """
    if X.n <= 1:
        return []
    cands = [U for U in X.opens if 0 < U < X.full]
    greedy = greedy_separating_opens(X)

    def dfs(start: int, cells: list[PointSet], left: int, chosen: list[PointSet]) -> list[PointSet] | None:
        if not cells:
            return list(chosen)
        if left == 0:
            return None
        cap = 1 << (left - 1)
        for k in range(start, len(cands)):
            U = cands[k]
            nxt = _split(cells, U)
            if max((c.bit_count() for c in nxt), default=0) > cap:
                continue
            if len(nxt) == len(cells) and nxt == cells:
                continue
            chosen.append(U)
            found = dfs(k + 1, nxt, left - 1, chosen)
            chosen.pop()
            if found is not None:
                return found
        return None

    for size in range(log2ceil(X.n), len(greedy) + 1):
        found = dfs(0, [X.full], size, [])
        if found is not None:
            return found
    raise AssertionError("greedy family size should always be attainable")


def psw0(X: FiniteSpace) -> int:
    """T0-pseudoweight: least number of open sets splitting every pair."""
    return len(psw0_witness(X))


# ---------------------------------------------------------------- records


def _space_witness(X: FiniteSpace, **extra) -> dict:
    out = {"code": canonical_code(X).decode(), "space": to_json(X)}
    out.update(extra)
    return out


def _run(fn: Callable, items: Sequence, jobs: int) -> list:
    if jobs <= 1 or len(items) < 2:
        return [fn(x) for x in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items, chunksize=max(1, len(items) // (4 * jobs))))


def _collect(name: str, desc: str, parts: Iterable[InvariantReport], started: float) -> InvariantReport:
    report = InvariantReport(name, desc)
    for p in parts:
        report.merge(p)
    report.seconds = time.perf_counter() - started
    return report


# ---------------------------------------------------------------- core chain


def core_record(X: FiniteSpace) -> dict:
    """Exact (sm, ps, psw0) of ``X`` with the optimal ps strategy's range."""
    smv, sm_target = game.sm_witness(X)
    solver = Solver(X, PS)
    psv = solver.value()
    rng = strategy_range(extract_seeker(X, PS, solver))
    return {"sm": smv, "sm_target": sm_target, "ps": psv, "psw0": psw0(X), "range": rng}


def _core_one(X: FiniteSpace) -> InvariantReport:
    r = InvariantReport("core", "")
    rec = core_record(X)
    smv, psv, pw = rec["sm"], rec["ps"], rec["psw0"]
    violations = []
    if not smv <= psv <= pw:
        violations.append("sm <= ps <= psw0")
    if psv < log2ceil(X.n):
        violations.append("ps >= log2ceil(n)")
    if pw > (1 << psv) - 1:
        violations.append("psw0 <= 2^ps - 1")
    if not separates_all_pairs(X.n, rec["range"]):
        violations.append("strategy range separates all pairs")
    eq = psv == max(smv, log2ceil(X.n))
    r.notes["ps == max(sm, log2ceil n)"] = int(eq)
    r.record(
        not violations,
        _space_witness(X, sm=smv, ps=psv, psw0=pw, violations=violations),
    )
    return r


def check_core_chain(spaces: Sequence[FiniteSpace], jobs: int = 1, desc: str = "") -> InvariantReport:
    """sm <= ps <= psw0, ps >= log2ceil(n), psw0 <= 2^ps - 1, and the optimal
    Seeker's range of moves splits every pair."""
    t = time.perf_counter()
    return _collect("core chain", desc or f"{len(spaces)} spaces", _run(_core_one, spaces, jobs), t)


def _seqsep_one(X: FiniteSpace) -> InvariantReport:
    r = InvariantReport("seqsep", "")
    s = sequential_separating_seeker(X)
    psv = game.ps_value(X)
    smv = game.sm(X)
    limit = log2ceil(X.n) * smv
    ok = psv <= s.bound <= limit
    r.record(ok, _space_witness(X, ps=psv, seqsep_bound=s.bound, log_times_sm=limit))
    return r


def check_sequential_bound(spaces: Sequence[FiniteSpace], jobs: int = 1, desc: str = "") -> InvariantReport:
    """ps <= sum of membership numbers of the binary coding family <= log2ceil(n) * sm."""
    t = time.perf_counter()
    return _collect("ps <= seqsep bound <= log2ceil(n)*sm", desc or f"{len(spaces)} spaces", _run(_seqsep_one, spaces, jobs), t)


# ---------------------------------------------------------------- composition


def _composition_one(pair: tuple[FiniteSpace, FiniteSpace]) -> InvariantReport:
    a, b = pair
    r = InvariantReport("composition", "")
    ps_a, ps_b = game.ps_value(a), game.ps_value(b)
    sm_a, sm_b = game.sm(a), game.sm(b)
    P = product(a, b)
    S = topological_sum([a, b])
    ps_p, ps_s, sm_s = game.ps_value(P), game.ps_value(S), game.sm(S)
    violations = []
    if ps_p > ps_a + ps_b:
        violations.append("ps(a x b) <= ps(a) + ps(b)")
    if sm_s > max(sm_a, sm_b) + 1:
        violations.append("sm(a + b) <= max sm + 1")
    if ps_s > log2ceil(2) + max(ps_a, ps_b):
        violations.append("ps(a + b) <= 1 + max ps")
    if is_discrete(a) and is_discrete(b) and sm_s > max(a.n, b.n):
        violations.append("sm(a + b) <= max part size (discrete parts)")
    r.notes["sm(sum) == max sm"] = int(sm_s == max(sm_a, sm_b))
    r.notes["ps(product) == ps(a) + ps(b)"] = int(ps_p == ps_a + ps_b)
    r.notes["opens(product) == opens(a) * opens(b)"] = int(len(P.opens) == len(a.opens) * len(b.opens))
    r.record(
        not violations,
        {
            "a": _space_witness(a),
            "b": _space_witness(b),
            "ps": [ps_a, ps_b, ps_p, ps_s],
            "sm": [sm_a, sm_b, sm_s],
            "violations": violations,
        },
    )
    return r


def check_composition_theorems(pairs: Sequence[tuple[FiniteSpace, FiniteSpace]], jobs: int = 1, desc: str = "") -> InvariantReport:
    """Sum and product inequalities on exact values; equality rates go to notes."""
    t = time.perf_counter()
    return _collect("composition", desc or f"{len(pairs)} ordered pairs", _run(_composition_one, pairs, jobs), t)


# ---------------------------------------------------------------- special classes


def discrete_triple(m: int) -> tuple[int, int, int]:
    D = discrete(m)
    return game.ps_value(D), game.sm(D), psw0(D)


def expected_discrete_triple(m: int) -> tuple[int, int, int]:
    return log2ceil(m), 1 if m >= 2 else 0, log2ceil(m)


def _special_one(X: FiniteSpace) -> InvariantReport:
    r = InvariantReport("special", "")
    violations = []
    door = is_door(X)
    if door and game.sm(X) > 1:
        violations.append("door => sm <= 1")
    applicable = 0
    for Y in iter_subsets(X.full):
        F = Y & ~interior(X, Y)
        if is_closed(X, F):
            applicable += 1
            if game.sm_set(X, Y) > 2:
                violations.append(f"two-move bound fails for Y={Y}")
    r.notes["door spaces"] = int(door)
    r.notes["two-move applicable targets"] = applicable
    r.record(not violations, _space_witness(X, violations=violations))
    return r


def check_special_classes(spaces: Sequence[FiniteSpace], discrete_max: int = 16, jobs: int = 1, desc: str = "") -> InvariantReport:
    """Door spaces have sm <= 1; discrete spaces have the exact triple
    (log2ceil m, [m >= 2], log2ceil m); Y - int(Y) closed gives sm(Y) <= 2."""
    t = time.perf_counter()
    parts = _run(_special_one, spaces, jobs)
    disc = InvariantReport("discrete", "")
    for m in range(1, discrete_max + 1):
        got, want = discrete_triple(m), expected_discrete_triple(m)
        disc.record(got == want, {"m": m, "got": list(got), "expected": list(want)})
    return _collect("special classes", desc or f"{len(spaces)} spaces + discrete(1..{discrete_max})", [*parts, disc], t)


# ---------------------------------------------------------------- strategies


def _two_move_one(X: FiniteSpace) -> InvariantReport:
    r = InvariantReport("two_move", "")
    for Y in iter_subsets(X.full):
        s = two_move_membership(X, Y)
        if isinstance(s, Inapplicable):
            r.notes["inapplicable"] = r.notes.get("inapplicable", 0) + 1
            continue
        rep = verify_strategy(X, s.goal, s, s.bound)
        r.record(rep.ok, _space_witness(X, which="two_move", target=Y, detail=rep.counterexamples))
    return r


def _strategy_pair_one(pair: tuple[FiniteSpace, FiniteSpace]) -> InvariantReport:
    a, b = pair
    r = InvariantReport("pair strategies", "")

    def check(which: str, s, extra: dict) -> None:
        rep = verify_strategy(s.space, s.goal, s, s.bound)
        r.record(rep.ok, {"which": which, "a": _space_witness(a), "b": _space_witness(b), **extra, "detail": rep.counterexamples})

    fam = sum_family([a, b])
    S = fam.space
    check("seqsep", sequential_separating_seeker(S), {"on": "sum"})
    check("seqsep", sequential_separating_seeker(product(a, b)), {"on": "product"})
    check("sum", sum_seeker([a, b]), {})
    check("product", product_seeker(a, b), {})
    for Y in iter_subsets(S.full):
        check("summem", sum_membership_seeker([a, b], Y), {"target": Y})
        if is_discrete(a) and is_discrete(b):
            check("colelim", column_elimination_seeker([a, b], Y), {"target": Y})
    return r


def check_strategies(spaces: Sequence[FiniteSpace], pairs: Sequence[tuple[FiniteSpace, FiniteSpace]], jobs: int = 1, desc: str = "") -> InvariantReport:
    """Every constructive strategy survives the exhaustive adversary at its bound."""
    t = time.perf_counter()
    parts = _run(_two_move_one, spaces, jobs) + _run(_strategy_pair_one, pairs, jobs)
    return _collect("strategy validation", desc or f"{len(spaces)} spaces, {len(pairs)} pairs", parts, t)


# ---------------------------------------------------------------- determinacy & monotonicity


def determinacy_trial(X: FiniteSpace, goal: GameGoal, n: int) -> dict:
    """Extract both sides at horizon ``n`` and verify each exhaustively."""
    solver = Solver(X, goal)
    seeker = extract_seeker(X, goal, solver)
    seeker_ok = verify_strategy(X, goal, seeker, n).ok
    hider_ok = False
    committed = True
    try:
        hider = extract_hider(X, goal, n, solver)
    except HiderCannotWin:
        pass
    else:
        hider_ok = verify_strategy(X, goal, hider, n).ok
        final = game.play(seeker, hider, n).outcome
        # a surviving final state still admits a committed secret point
        committed = not is_terminal(goal, final)
    return {"value": solver.value(), "seeker": seeker_ok, "hider": hider_ok, "committed": committed}


def check_determinacy(spaces: Sequence[FiniteSpace], trials: int = 200, seed: int = 0) -> InvariantReport:
    """Exactly one side's extracted strategy wins at each sampled horizon."""
    t = time.perf_counter()
    rng = random.Random(seed)
    report = InvariantReport("determinacy", f"{trials} seeded triples, seed={seed}")
    psw0_cache: dict[int, int] = {}
    for _ in range(trials):
        k = rng.randrange(len(spaces))
        X = spaces[k]
        Y = rng.getrandbits(X.n) if X.n else 0
        if k not in psw0_cache:
            psw0_cache[k] = psw0(X)
        n = rng.randint(0, psw0_cache[k])
        for goal in (GameGoal(Y), PS):
            res = determinacy_trial(X, goal, n)
            ok = (res["seeker"] != res["hider"]) and res["committed"]
            ok = ok and res["seeker"] == (res["value"] <= n)
            report.record(ok, _space_witness(X, goal=goal.kind, target=goal.target, horizon=n, **res))
    report.seconds = time.perf_counter() - t
    return report


def check_monotonicity(spaces: Sequence[FiniteSpace], samples: int = 1000, seed: int = 0) -> InvariantReport:
    """Absorption of terminal states and val(W') <= val(W) for random W' inside W."""
    t = time.perf_counter()
    rng = random.Random(seed)
    report = InvariantReport("monotonicity", f"{samples} seeded pairs, seed={seed}")
    for _ in range(samples):
        X = spaces[rng.randrange(len(spaces))]
        goal = PS if rng.random() < 0.5 else GameGoal(rng.getrandbits(X.n))
        W = rng.getrandbits(X.n)
        W2 = W & rng.getrandbits(X.n)
        solver = Solver(X, goal)
        v, v2 = solver.value(W), solver.value(W2)
        absorbed = not is_terminal(goal, W) or is_terminal(goal, W2)
        ok = absorbed and v2 <= v
        report.record(ok, _space_witness(X, goal=goal.kind, target=goal.target, W=W, W_sub=W2, values=[v, v2]))
    report.seconds = time.perf_counter() - t
    return report


# ---------------------------------------------------------------- suites

SUITES = ("core", "composition", "special", "strategies", "dynamics")


def run_suites(names: Sequence[str], max_n: int = 5, jobs: int = 1, seed: int = 0) -> list[InvariantReport]:
    """Run the named suites; ``all`` expands to every suite."""
    if "all" in names:
        names = SUITES
    spaces = corpus(max_n)
    small = [X for X in spaces if X.n <= 3]
    pairs = [(a, b) for a in small for b in small]
    reports = []
    for name in names:
        if name == "core":
            reports.append(check_core_chain(spaces, jobs, f"all T0 spaces up to iso, 1 <= n <= {max_n}"))
            reports.append(check_sequential_bound(spaces, jobs, f"all T0 spaces up to iso, 1 <= n <= {max_n}"))
        elif name == "composition":
            reports.append(check_composition_theorems(pairs, jobs, "ordered pairs, n <= 3"))
        elif name == "special":
            reports.append(check_special_classes(spaces, 16, jobs, f"n <= {max_n} corpus + discrete(1..16)"))
        elif name == "strategies":
            two = [X for X in spaces if X.n <= 4]
            reports.append(check_strategies(two, pairs, jobs, "two_move on n <= 4; pair strategies on n <= 3 pairs"))
        elif name == "dynamics":
            reports.append(check_determinacy(spaces, 200, seed))
            reports.append(check_monotonicity(spaces, 1000, seed))
        else:
            raise ValueError(f"unknown suite {name!r}")
    return reports
