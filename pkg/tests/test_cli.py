import csv
import json

import pytest

from projkit.cli import main, parse_grid, UsageError


@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    return tmp_path


def load(path):
    return json.loads(open(path).read())


def test_example_run_passes(capsys):
    assert main(["example", "run", "3.5", "--param", "theta=0.5", "--trunc", "8", "--json", "r.json"]) == 0
    r = load("r.json")
    assert r["pass"] and r["params"] == {"theta": 0.5, "trunc": 8, "fiber_dim": 24}
    assert "ok   3.5 alpha_p" in capsys.readouterr().out


def test_example_run_default_json_path():
    assert main(["example", "run", "3.3", "--trunc", "8"]) == 0
    assert load("example-report.json")["id"] == "3.3"


def test_example_run_errors(capsys):
    assert main(["example", "run", "4.10c", "--json", "nb.json"]) == 2
    assert "not built" in load("nb.json")["error"]
    assert main(["example", "run", "9.9", "--json", "u.json"]) == 2
    assert load("u.json")["pass"] is False
    assert main(["example", "run", "3.5", "--param", "phi=1", "--json", "p.json"]) == 2
    assert main(["example", "run", "3.5", "--param", "theta", "--json", "p.json"]) == 2
    assert main(["example", "run", "3.5", "--trunc", "4", "--json", "t.json"]) == 2
    assert "error" in load("t.json")
    assert "projkit: error" in capsys.readouterr().err


def test_example_list():
    assert main(["example", "list", "--json", "l.json"]) == 0
    r = load("l.json")
    assert "3.5" in r["built"] and "4.10c" in r["not_built"]


def test_config_file_and_precedence(in_tmp):
    (in_tmp / "run.cfg").write_text("trunc = 8\nparam.theta = 0.7\njson = cfg.json\n")
    assert main(["example", "run", "3.5", "--config", "run.cfg"]) == 0
    r = load("cfg.json")
    assert r["params"]["theta"] == 0.7 and r["params"]["trunc"] == 8
    assert main(["example", "run", "3.5", "--config", "run.cfg", "--trunc", "9", "--param", "theta=0.4"]) == 0
    r = load("cfg.json")
    assert r["params"]["theta"] == 0.4 and r["params"]["trunc"] == 9
    (in_tmp / "bad.cfg").write_text("colour = red\n")
    assert main(["example", "run", "3.5", "--config", "bad.cfg"]) == 2
    assert main(["example", "run", "3.5", "--config", "missing.cfg"]) == 2


def test_bounds_verify_writes_csv_and_json(in_tmp):
    code = main(["bounds", "verify", "--case", "II", "--grid", "0.8/0.15/0.0,0.3", "--csv", "b.csv", "--json", "b.json"])
    assert code == 0
    lines = open("b.csv").read().splitlines()
    assert lines[0] == "# schema=projkit.bounds/1"
    rows = list(csv.DictReader(lines[1:]))
    assert len(rows) == 2 and rows[0]["case"] == "II"
    r = load("b.json")
    assert r["pass"] and r["max_gap"] <= 1e-4


def test_bounds_verify_failure_reports_diagnostic():
    code = main(["bounds", "verify", "--case", "I", "--grid", "0.8/0.15/0.15", "--tol", "-1", "--json", "b.json"])
    assert code == 1
    assert "transcription_suspect" in load("b.json")["diagnostic"]


def test_bounds_verify_bad_grid():
    assert main(["bounds", "verify", "--grid", "1,2"]) == 2
    assert main(["bounds", "verify", "--grid", "3/0.1/0.1"]) == 2


def test_parse_grid():
    assert len(parse_grid("default")) == 27
    assert parse_grid("1/0,0.1/0.2") == [(1.0, 0.0, 0.2), (1.0, 0.1, 0.2)]
    with pytest.raises(UsageError):
        parse_grid("a/b/c")


def test_pairs_table():
    assert main(["pairs", "table", "--s", "1,inf", "--t", "1,inf", "--trunc", "8", "--json", "p.json"]) == 0
    r = load("p.json")
    assert r["schema"] == "projkit.pairs/1" and len(r["rows"]) == 3 and r["pass"]
    assert main(["pairs", "table", "--s", "0.5"]) == 2


def test_quick_suite(capsys):
    assert main(["suite", "all", "--quick", "--seed", "3", "--json", "s.json"]) == 0
    r = load("s.json")
    assert r["schema"] == "projkit.suite/1" and r["seed"] == 3 and r["quick"] is True
    assert set(r["sections"]) == {"examples", "bounds", "pairs", "lemma_3_7", "lemma_4_12", "spectral", "maximin"}
    out = capsys.readouterr().out
    assert out.count("ok  ") == 7


def test_usage_errors_exit_2():
    with pytest.raises(SystemExit) as exc:
        main(["example"])
    assert exc.value.code == 2
