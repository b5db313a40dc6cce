"""Command-line entry point: ``topogames <command> [options]``."""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import sys
from collections.abc import Callable
from dataclasses import dataclass, field
from pathlib import Path

from . import game
from . import pointset as ps
from .constructions import UP_TO_ISO_CAP, enumerate_t0, sum_family
from .game import PS, GameGoal, GameError, Solver
from .invariants import SUITES, psw0, run_suites
from .pointset import PointSet
from .space import (
    FiniteSpace,
    SpaceError,
    canonical_code,
    from_json,
    is_discrete,
    is_door,
    is_open,
    to_json,
)
from .strategies import (
    Inapplicable,
    column_elimination_seeker,
    greedy_hider,
    product_seeker,
    sequential_separating_seeker,
    sum_membership_seeker,
    sum_seeker,
    two_move_membership,
)

log = logging.getLogger("topogames")

CSV_COLUMNS = ["code", "n", "opens", "ps", "sm", "psw0", "door", "discrete"]
COMMANDS = ("analyze", "enumerate", "verify", "solve", "strategies", "play", "export")


class InputError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    max_n: int = 5
    jobs: int = 1
    inputs: list[str] = field(default_factory=list)
    output: str | None = None
    format: str = "json"
    seed: int = 0

    def __post_init__(self) -> None:
        if self.command not in COMMANDS:
            raise InputError(f"unknown command {self.command!r}")
        if self.command in ("verify", "enumerate") and not 0 <= self.max_n <= UP_TO_ISO_CAP:
            raise InputError(f"--max-n must be within 0..{UP_TO_ISO_CAP}")
        if self.jobs < 1:
            raise InputError("--jobs must be at least 1")


# ---------------------------------------------------------------- io helpers


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, indent=2)


def read_spaces(path: str) -> list[FiniteSpace]:
    """A single space JSON document, or one space per line."""
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    try:
        docs = [json.loads(text)]
    except json.JSONDecodeError:
        docs = []
        for lineno, line in enumerate(text.splitlines(), 1):
            if not line.strip():
                continue
            try:
                docs.append(json.loads(line))
            except json.JSONDecodeError as exc:
                raise InputError(f"{path}:{lineno}: {exc.msg}") from None
    out = []
    for k, doc in enumerate(docs, 1):
        try:
            out.append(from_json(doc))
        except (SpaceError, IndexError) as exc:
            where = f"{path}:{k}" if len(docs) > 1 else path
            raise InputError(f"{where}: {exc}") from None
    return out


def read_one(path: str) -> FiniteSpace:
    spaces = read_spaces(path)
    if len(spaces) != 1:
        raise InputError(f"{path}: expected exactly one space, found {len(spaces)}")
    return spaces[0]


def parse_target(X: FiniteSpace, text: str | None) -> PointSet:
    if text is None:
        raise InputError("--target is required for --goal sm")
    idx = {name: i for i, name in enumerate(X.names)}
    items = [t.strip() for t in text.split(",") if t.strip()]
    try:
        return ps.from_members(idx[t] for t in items)
    except KeyError as exc:
        raise InputError(f"unknown point {exc.args[0]!r} in --target") from None


def names_of(X: FiniteSpace, mask: PointSet) -> list[str]:
    return [X.names[x] for x in ps.iter_members(mask)]


def emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text if text.endswith("\n") else text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------- analyze / export


def analyze(X: FiniteSpace) -> dict:
    return {
        "code": canonical_code(X).decode(),
        "n": X.n,
        "opens": len(X.opens),
        "ps": game.ps_value(X),
        "sm": game.sm(X),
        "psw0": psw0(X),
        "door": is_door(X),
        "discrete": is_discrete(X),
    }


def export_table(records: list[dict], fmt: str) -> str:
    """Rows sorted by (n, code); duplicate codes keep the first record."""
    unique: dict[str, dict] = {}
    for rec in records:
        if rec["code"] in unique:
            log.warning("duplicate code %s collapsed", rec["code"])
            continue
        unique[rec["code"]] = rec
    rows = sorted(unique.values(), key=lambda r: (r["n"], r["code"]))
    if fmt == "json":
        return dumps([{k: r[k] for k in CSV_COLUMNS} for r in rows])
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in rows:
        w.writerow([str(r[k]).lower() if isinstance(r[k], bool) else r[k] for k in CSV_COLUMNS])
    return buf.getvalue()


def _cmd_analyze(args) -> int:
    records = [analyze(X) for path in args.input for X in read_spaces(path)]
    if args.format == "csv":
        emit(export_table(records, "csv"), args.output)
    else:
        emit(dumps(records[0] if len(records) == 1 else records), args.output)
    return 0


def _json_docs(path: str) -> list[tuple[int, object]]:
    """``(line, document)`` pairs from a whole JSON document or JSON lines."""
    text = Path(path).read_text()
    try:
        return [(1, json.loads(text))]
    except json.JSONDecodeError:
        pass
    out = []
    for lineno, line in enumerate(text.splitlines(), 1):
        if not line.strip():
            continue
        try:
            out.append((lineno, json.loads(line)))
        except json.JSONDecodeError as exc:
            raise InputError(f"{path}:{lineno}: {exc.msg}") from None
    return out


def _cmd_export(args) -> int:
    records = []
    for path in args.input:
        for lineno, doc in _json_docs(path):
            for d in doc if isinstance(doc, list) else [doc]:
                if "ps" in d:
                    records.append(d)
                    continue
                try:
                    records.append(analyze(from_json(d)))
                except (SpaceError, IndexError, ValueError) as exc:
                    raise InputError(f"{path}:{lineno}: {exc}") from None
    emit(export_table(records, args.format), args.output)
    return 0


# ---------------------------------------------------------------- enumerate / verify


def _cmd_enumerate(args) -> int:
    sizes = [args.n] if args.n is not None else range(1, args.max_n + 1)
    out = open(args.output, "w") if args.output else sys.stdout
    try:
        for n in sizes:
            for X in enumerate_t0(n, args.mode, cap=max(args.max_n, n)):
                doc = to_json(X)
                doc["code"] = canonical_code(X).decode()
                out.write(json.dumps(doc, sort_keys=True) + "\n")
    finally:
        if args.output:
            out.close()
    return 0


def _cmd_verify(args) -> int:
    suites = [args.suite] if args.suite != "all" else list(SUITES)
    reports = run_suites(suites, max_n=args.max_n, jobs=args.jobs, seed=args.seed)
    width = max(len(r.predicate) for r in reports)
    lines = []
    for r in reports:
        status = "PASS" if r.ok else "FAIL"
        lines.append(f"{status}  {r.predicate:<{width}}  passed={r.passed:<5} failed={r.failed:<3} {r.corpus}")
    print("\n".join(lines), file=sys.stderr if args.output is None else sys.stdout)
    doc = {
        "config": {"suite": args.suite, "max_n": args.max_n, "seed": args.seed},
        "reports": [r.to_json(timings=args.timings) for r in reports],
        "ok": all(r.ok for r in reports),
    }
    emit(dumps(doc), args.output)
    return 0 if doc["ok"] else 1


# ---------------------------------------------------------------- solve


def _goal_from_args(X: FiniteSpace, args) -> GameGoal:
    if args.goal == "sm":
        return GameGoal(parse_target(X, args.target))
    return PS


def optimal_play(X: FiniteSpace, goal: GameGoal, solver: Solver, horizon: int | None = None) -> game.GameTranscript:
    """Optimal Seeker against the longest-surviving Hider."""
    v = solver.value()
    n = v if horizon is None else horizon
    seeker = game.extract_seeker(X, goal, solver)
    if v > 0:
        hider = game.extract_hider(X, goal, min(n, v - 1), solver)
    else:
        hider = greedy_hider(X, goal)
    t = game.play(seeker, hider, n)
    game.replay(t)
    return t


def _cmd_solve(args) -> int:
    X = read_one(args.input[0])
    goal = _goal_from_args(X, args)
    solver = Solver(X, goal)
    v = solver.value()
    out = {"goal": goal.kind, "value": v, "n": X.n}
    if goal.target is not None:
        out["target"] = names_of(X, goal.target)
    if args.horizon is not None:
        out["horizon"] = args.horizon
        out["winner"] = "seeker" if v <= args.horizon else "hider"
    if args.emit_strategy:
        if args.horizon is not None and v > args.horizon:
            out["strategy"] = {"side": "hider", "survives": args.horizon}
        else:
            s = game.extract_seeker(X, goal, solver)
            out["strategy"] = {"side": "seeker", "moves": game.seeker_table(s)}
    if args.emit_transcript:
        out["transcript"] = optimal_play(X, goal, solver, args.horizon).to_json()
    emit(dumps(out), args.output)
    return 0


# ---------------------------------------------------------------- strategies


def build_strategy(which: str, spaces: list[FiniteSpace], target: str | None):
    """Return ``(strategy_or_inapplicable, horizon)`` for the named construction."""
    first = spaces[0]
    if which == "two_move":
        return two_move_membership(first, parse_target(first, target)), 2
    if which == "seqsep":
        s = sequential_separating_seeker(first)
        return s, s.bound
    if which == "greedy":
        solver = Solver(first, PS)
        return greedy_hider(first, PS, solver), max(0, solver.value() - 1)
    if which == "product":
        if len(spaces) != 2:
            raise InputError("--which product needs exactly two --input spaces")
        s = product_seeker(spaces[0], spaces[1])
        return s, s.bound
    if which == "sum":
        s = sum_seeker(spaces)
        return s, s.bound
    S = sum_family(spaces).space
    if which == "summem":
        s = sum_membership_seeker(spaces, parse_target(S, target))
        return s, s.bound
    if which == "colelim":
        s = column_elimination_seeker(spaces, parse_target(S, target))
        return s, s.bound
    raise InputError(f"unknown strategy {which!r}")


def _cmd_strategies(args) -> int:
    spaces = [read_one(p) for p in args.input]
    s, horizon = build_strategy(args.which, spaces, args.target)
    if isinstance(s, Inapplicable):
        emit(dumps({"which": args.which, "applicable": False, "reason": s.reason}), args.output)
        return 0
    if args.horizon is not None:
        horizon = args.horizon
    rep = game.verify_strategy(s.space, s.goal, s, horizon)
    doc = {
        "which": args.which,
        "applicable": True,
        "side": s.side,
        "goal": s.goal.kind,
        "horizon": horizon,
        "report": rep.to_json(timings=False),
    }
    if s.side == "seeker":
        doc["bound"] = s.bound
        doc["moves"] = game.seeker_table(s)
    emit(dumps(doc), args.output)
    return 0 if rep.ok else 1


# ---------------------------------------------------------------- play


def play_session(
    X: FiniteSpace,
    goal: GameGoal,
    side: str,
    ask: Callable[[str], str],
    say: Callable[[str], None],
    max_rounds: int | None = None,
) -> game.GameTranscript:
    """Human plays ``side`` against the engine's optimal opponent."""
    solver = Solver(X, goal)
    v = solver.value()
    seeker = game.extract_seeker(X, goal, solver)
    W = X.full
    steps: list[tuple[PointSet, int]] = []
    say(f"value of this game: {v}")
    rounds = 0
    while not game.is_terminal(goal, W):
        if max_rounds is not None and rounds >= max_rounds:
            say("round limit reached")
            break
        say(f"round {rounds}: state W = {ps.fmt(W, X.names)}")
        if side == "seeker":
            options = game.traces(X, W)
            for k, t in enumerate(options):
                say(f"  [{k}] trace {ps.fmt(t, X.names)}")
            U = _ask_open(X, options, ask, say)
            i = solver.hider_reply(W, U)
            say(f"hider answers {i}")
        else:
            U = seeker.move(W)
            say(f"seeker asks {ps.fmt(U, X.names)}")
            i = _ask_bit(ask, say)
        steps.append((U, i))
        W &= game.bracket(X, U, i)
        rounds += 1
    t = game.make_transcript(X, goal, steps)
    game.replay(t)
    say(f"outcome {ps.fmt(t.outcome, X.names)}: {t.winner} wins after {len(t.rounds)} rounds")
    return t


def _ask_open(X: FiniteSpace, options: list[PointSet], ask, say) -> PointSet:
    idx = {name: i for i, name in enumerate(X.names)}
    while True:
        raw = ask("open set (option number or comma-separated points): ").strip()
        if raw.startswith("#") or (raw.isdigit() and raw not in idx):
            k = int(raw.lstrip("#"))
            if 0 <= k < len(options):
                return X.up_closure(options[k])
            say("no such option")
            continue
        try:
            U = ps.from_members(idx[t.strip()] for t in raw.split(",") if t.strip())
        except KeyError as exc:
            say(f"unknown point {exc.args[0]!r}")
            continue
        if not is_open(X, U):
            say(f"{ps.fmt(U, X.names)} is not open; try again")
            continue
        return U


def _ask_bit(ask, say) -> int:
    while True:
        raw = ask("reply (1 = inside, 0 = outside): ").strip()
        if raw in ("0", "1"):
            return int(raw)
        say("answer 0 or 1")


def _cmd_play(args) -> int:
    X = read_one(args.input[0])
    goal = _goal_from_args(X, args)
    t = play_session(X, goal, args.side, input, print, args.horizon)
    if args.output:
        emit(dumps(t.to_json()), args.output)
    return 0


# ---------------------------------------------------------------- entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--output", help="write the result here instead of stdout")
    common.add_argument("--format", choices=["json", "csv"], default="json")
    common.add_argument("--jobs", type=int, default=1)
    common.add_argument("--seed", type=int, default=0)
    common.add_argument("--max-n", type=int, default=5)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="topogames", description="Exact Seeker/Hider games on finite T0 spaces.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", parents=[common], help="ps, sm, psw0 and predicates of spaces")
    p.add_argument("--input", action="append", required=True)

    p = sub.add_parser("export", parents=[common], help="CSV/JSON table from analyze or enumerate output")
    p.add_argument("--input", action="append", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="stream T0 spaces as JSON lines")
    p.add_argument("--n", type=int, help="a single size instead of 1..max-n")
    p.add_argument("--mode", choices=["up_to_iso", "labeled"], default="up_to_iso")

    p = sub.add_parser("verify", parents=[common], help="run theorem-check suites")
    p.add_argument("--suite", choices=[*SUITES, "all"], default="all")
    p.add_argument("--timings", action="store_true", help="include wall times (breaks byte-identical output)")

    for name, helptext in (("solve", "game value, strategy and transcript"), ("play", "interactive game")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--input", action="append", required=True)
        p.add_argument("--goal", choices=["ps", "sm"], default="ps")
        p.add_argument("--target")
        p.add_argument("--horizon", type=int)
        if name == "solve":
            p.add_argument("--emit-strategy", action="store_true")
            p.add_argument("--emit-transcript", action="store_true")
        else:
            p.add_argument("--side", choices=["seeker", "hider"], default="seeker")

    p = sub.add_parser("strategies", parents=[common], help="build and exhaustively verify a constructive strategy")
    p.add_argument("--input", action="append", required=True, help="repeat for sum/product parts")
    p.add_argument("--which", required=True, choices=["two_move", "seqsep", "sum", "product", "summem", "colelim", "greedy"])
    p.add_argument("--target")
    p.add_argument("--horizon", type=int)
    return parser


HANDLERS = {
    "analyze": _cmd_analyze,
    "export": _cmd_export,
    "enumerate": _cmd_enumerate,
    "verify": _cmd_verify,
    "solve": _cmd_solve,
    "strategies": _cmd_strategies,
    "play": _cmd_play,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        RunConfig(
            command=args.command,
            max_n=args.max_n,
            jobs=args.jobs,
            inputs=list(getattr(args, "input", None) or []),
            output=args.output,
            format=args.format,
            seed=args.seed,
        )
        return HANDLERS[args.command](args)
    except (InputError, SpaceError, GameError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
