import itertools
import json

import pytest

from topogames import cli
from topogames.constructions import chain, discrete, sierpinski
from topogames.game import PS, replay
from topogames.space import to_json


def write_space(tmp_path, name, X):
    p = tmp_path / f"{name}.json"
    p.write_text(json.dumps(to_json(X)))
    return str(p)


def run(argv, capsys):
    code = cli.main(argv)
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.mark.parametrize(
    "X,expected",
    [
        (sierpinski(), {"n": 2, "ps": 1, "sm": 1, "psw0": 1, "door": True}),
        (chain(3), {"n": 3, "ps": 2, "sm": 2, "psw0": 2, "door": False}),
        (discrete(4), {"n": 4, "ps": 2, "sm": 1, "psw0": 2}),
    ],
)
def test_analyze_records(tmp_path, capsys, X, expected):
    code, out, _ = run(["analyze", "--input", write_space(tmp_path, "x", X)], capsys)
    rec = json.loads(out)
    assert code == 0
    assert {k: rec[k] for k in expected} == expected


def test_export_csv(tmp_path, capsys):
    recs = [cli.analyze(sierpinski()), cli.analyze(chain(3))]
    text = cli.export_table(recs, "csv")
    lines = text.strip().splitlines()
    assert lines[0] == "code,n,opens,ps,sm,psw0,door,discrete" and len(lines) == 3
    assert cli.export_table([], "csv").strip() == "code,n,opens,ps,sm,psw0,door,discrete"


def test_export_collapses_duplicates(caplog):
    rec = cli.analyze(chain(3))
    with caplog.at_level("WARNING"):
        text = cli.export_table([rec, dict(rec)], "csv")
    assert len(text.strip().splitlines()) == 2
    assert "duplicate" in caplog.text


def test_export_from_analyze_output(tmp_path, capsys):
    a = tmp_path / "a.json"
    cli.main(["analyze", "--input", write_space(tmp_path, "s", sierpinski()), "--output", str(a)])
    code, out, _ = run(["export", "--input", str(a), "--format", "csv"], capsys)
    assert code == 0 and len(out.strip().splitlines()) == 2


def test_enumerate_lines(capsys):
    code, out, _ = run(["enumerate", "--n", "3"], capsys)
    docs = [json.loads(line) for line in out.splitlines()]
    assert code == 0 and len(docs) == 5 and all("code" in d for d in docs)


def test_solve_json(tmp_path, capsys):
    path = write_space(tmp_path, "c", chain(3))
    code, out, _ = run(["solve", "--input", path, "--goal", "sm", "--target", "0,2", "--emit-transcript", "--emit-strategy"], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["value"] == 2 and doc["strategy"]["side"] == "seeker"
    assert doc["transcript"]["winner"] == "seeker"


def test_strategies_command(tmp_path, capsys):
    path = write_space(tmp_path, "c", chain(3))
    code, out, _ = run(["strategies", "--which", "two_move", "--input", path, "--target", "1"], capsys)
    assert code == 0 and json.loads(out)["applicable"] is False
    code, out, _ = run(["strategies", "--which", "sum", "--input", path, "--input", path], capsys)
    doc = json.loads(out)
    assert code == 0 and doc["report"]["failed"] == 0


def scripted(answers):
    it = iter(answers)
    asked = []

    def ask(prompt):
        asked.append(prompt)
        return next(it)

    return ask, asked


def test_human_hider_on_discrete4_lasts_two_rounds():
    X = discrete(4)
    for replies in itertools.product("01", repeat=2):
        ask, _ = scripted(replies)
        t = cli.play_session(X, PS, "hider", ask, lambda s: None)
        replay(t)
        assert len(t.rounds) == 2 and t.winner == "seeker"


def test_human_seeker_on_sierpinski():
    ask, asked = scripted(["1"])
    t = cli.play_session(sierpinski(), PS, "seeker", ask, lambda s: None)
    assert len(t.rounds) == 1 and t.winner == "seeker" and len(asked) == 1


def test_human_seeker_non_open_reprompts():
    said = []
    ask, asked = scripted(["0", "1"])
    t = cli.play_session(sierpinski(), PS, "seeker", ask, said.append)
    assert len(asked) == 2 and len(t.rounds) == 1
    assert any("not open" in s for s in said)


def test_verify_byte_identical(tmp_path, capsys):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    for p in (a, b):
        assert cli.main(["verify", "--suite", "dynamics", "--max-n", "4", "--seed", "7", "--output", str(p)]) == 0
    capsys.readouterr()
    assert a.read_bytes() == b.read_bytes()


def test_bad_input_reports_line(tmp_path, capsys):
    p = tmp_path / "bad.jsonl"
    p.write_text(json.dumps(to_json(chain(2))) + "\n{not json\n")
    code, _, err = run(["analyze", "--input", str(p)], capsys)
    assert code == 2 and "bad.jsonl:2" in err
    p.write_text(json.dumps({"points": ["a", "b"], "le": [["a", "b"], ["b", "a"]]}))
    code, _, err = run(["analyze", "--input", str(p)], capsys)
    assert code == 2 and "error" in err


def test_run_config_validation():
    with pytest.raises(cli.InputError):
        cli.RunConfig("verify", max_n=9)
    with pytest.raises(cli.InputError):
        cli.RunConfig("analyze", jobs=0)
