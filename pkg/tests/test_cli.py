import json

import jsonschema
import pytest

from rank3frob.cli import load_schema, main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv, "--json")
    doc = json.loads(out) if out.strip() else None
    if doc is not None:
        jsonschema.validate(doc, load_schema())
    return code, doc, out


def test_bp_p3(capsys):
    code, doc, _ = run_json(capsys, "bp", "--p", "3")
    assert code == 0 and doc["b"] == [1, 2] and doc["a"] == [1, 2]


def test_bp_convention_none(capsys):
    code, doc, _ = run_json(capsys, "bp", "--p", "5", "--convention", "none")
    assert code == 0 and doc["b"] == [1, 4]


def test_count_json(capsys):
    code, doc, _ = run_json(capsys, "count", "--p", "5", "--k", "1")
    assert code == 0 and doc["count"] == 21 and doc["kind"] == "straight"
    code, doc, _ = run_json(capsys, "count", "--p", "5", "--k", "1", "--twisted")
    assert doc["count"] == 33


def test_count_bad_prime_is_usage_error(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["count", "--p", "2", "--k", "1"])
    assert exc.value.code == 2


def test_invalid_config_gives_no_output(capsys):
    code, out, err = run(capsys, "bp", "--p", "3", "--workers", "0")
    assert code == 2 and out == "" and "workers" in err
    code, out, err = run(capsys, "bp", "--p", "3", "--K", "4", "--max-K", "3")
    assert code == 2 and out == ""


def test_env_workers(capsys, monkeypatch):
    monkeypatch.setenv("RANK3FROB_WORKERS", "many")
    code, out, _ = run(capsys, "count", "--p", "3", "--k", "1")
    assert code == 2 and out == ""
    monkeypatch.setenv("RANK3FROB_WORKERS", "2")
    code, doc, _ = run_json(capsys, "count", "--p", "7", "--k", "2")
    assert code == 0 and doc["count"] == 2445


def test_budget_exit_code(capsys):
    code, out, _ = run(capsys, "count", "--p", "11", "--k", "2", "--budget", "100")
    assert code == 3 and out == ""
    code, out, _ = run(capsys, "bp", "--p", "11", "--budget", "100")
    assert code == 3


def test_strict_ambiguity(capsys):
    code, _, _ = run(capsys, "solve", "--p", "11", "--max-K", "2", "--strict")
    assert code == 4
    code, doc, _ = run_json(capsys, "solve", "--p", "11", "--max-K", "2")
    assert code == 0 and doc["status"] == "ambiguous" and [-7, -10] in doc["survivors"]
    code, _, _ = run(capsys, "bp", "--p", "11", "--max-K", "2", "--strict")
    assert code == 4


def test_tampered_fixture_exit_5(capsys, tmp_path):
    f = tmp_path / "fx.json"
    f.write_text(json.dumps({"level": 128, "convention": "chi", "rows": [{"p": 3, "b": [1, -2]}]}))
    code, _, err = run(capsys, "bp", "--p", "3", "--fixtures", str(f))
    assert code == 5 and "fixture" in err
    code, _, _ = run(capsys, "report", "--range", "3..3", "--fixtures", str(f))
    assert code == 5


def test_local_commands(capsys):
    code, out, _ = run(capsys, "lfactor", "--p", "3")
    assert code == 0 and "1 - (1+2i)X + (3-6i)X^2 - 27X^3" in out
    code, doc, _ = run_json(capsys, "purity", "--p", "3")
    assert doc["pure"] is True
    code, doc, _ = run_json(capsys, "roots2", "--p", "3")
    assert doc["distinct_roots"] == 3
    code, doc, _ = run_json(capsys, "cusp", "--p", "3")
    assert doc["roots"] == [[4, [0, 3]]]
    code, doc, _ = run_json(capsys, "cusp", "--p", "5", "--max-order", "64")
    assert doc["roots"] == []
    code, doc, _ = run_json(capsys, "roots2", "--p", "61", "--b=63,20")
    assert doc["distinct_roots"] == 0


def test_report_single_prime(capsys, tmp_path):
    timing = tmp_path / "t.json"
    code, doc, out1 = run_json(capsys, "report", "--range", "3..3", "--timing", str(timing))
    assert code == 0
    (row,) = doc["primes"]
    assert row["b"] == [1, 2] and row["pure"] is True and row["roots_q2i"] == 3
    assert row["unique"] is True and row["K"] == 3
    assert doc["census"]["primes"] == [3]
    assert all(c["ok"] for c in doc["checks"])
    assert json.loads(timing.read_text())["workers"] is None
    code, _, out2 = run_json(capsys, "report", "--range", "3..3", "--workers", "2")
    assert out1 == out2


def test_report_with_table_lacking_prime(capsys, tmp_path):
    t = tmp_path / "user.tsv"
    t.write_text("level=128 convention=chi semisimple=yes ramification=2 field=Q2(i)\n3\t1\t2\n")
    code, doc, _ = run_json(capsys, "report", "--range", "5..5", "--table", str(t))
    assert doc["grenie"]["verdict"] == "insufficient"
    assert 5 in doc["grenie"]["missing"]


def test_report_csv(capsys):
    code, out, _ = run(capsys, "report", "--range", "3..5", "--csv")
    lines = out.strip().splitlines()
    assert lines[0] == "p,status,b,roots_q2i"
    assert lines[1] == "3,resolved,1+2i,3"
    assert lines[2] == "5,resolved,-1-4i,0"


def test_ingest_and_compare(capsys, tmp_path):
    rows = {5: (-1, -4), 7: (1, 4), 11: (-7, -10), 17: (7, 0), 23: (17, -4), 31: (1, 0)}
    header = "level=128 convention=chi semisimple=yes ramification=2 field=Q2(i)\n"
    a = tmp_path / "a.tsv"
    a.write_text(header + "".join(f"{p}\t{x}\t{y}\n" for p, (x, y) in rows.items()))
    b = tmp_path / "b.tsv"
    rows[17] = (8, 0)
    b.write_text(header + "".join(f"{p}\t{x}\t{y}\n" for p, (x, y) in rows.items()))
    code, doc, _ = run_json(capsys, "ingest", "--file", str(a))
    assert code == 0 and len(doc["table"]["rows"]) == 6 and doc["ledger"]["ok"]
    code, doc, _ = run_json(capsys, "compare", "--left", str(a), "--right", str(a))
    assert doc["verdict"] == "equivalent"
    code, doc, _ = run_json(capsys, "compare", "--left", str(a), "--right", str(b))
    assert doc == {"command": "compare", "policy": "grenie3", "verdict": "distinct", "witness": 17}


def test_ingest_parse_error(capsys, tmp_path):
    f = tmp_path / "bad.tsv"
    f.write_text("3\t1\t2\n3\t1\t2\n")
    code, out, err = run(capsys, "ingest", "--file", str(f))
    assert code == 2 and out == "" and "strictly increasing" in err


def test_census_small_range(capsys):
    code, doc, _ = run_json(capsys, "census", "--range", "3..13")
    assert code == 0 and doc["primes"] == [3, 11]
    assert doc["roots"] == {"3": 3, "5": 0, "7": 1, "11": 3, "13": 0}
