import csv
import io
import json
import subprocess
import sys

import pytest

from ait.cli import main
from ait.coding import read_quadruples
from ait.golden import data_path
from ait.report import load_report

LEAVES = ["codes classify", "codes kraft", "codes construct", "codes encode", "codes decode", "entropy compute",
          "entropy sf-code", "entropy dpi", "machine run", "machine encode", "machine index", "machine enumerate",
          "omega compute", "omega halting", "chi table", "complexity estimate", "complexity gap", "busy-beaver",
          "census", "coding allocate", "coding decode", "coding domination", "coding from-semimeasure", "golden"]


def call(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def result(capsys, *argv):
    code, out, err = call(capsys, *argv)
    assert code == 0, err
    return load_report(out)["result"]


def test_kraft_examples(capsys):
    r = result(capsys, "codes", "kraft", "--lengths", "1,2,3,3")
    assert r["sum"] == "1" and r["satisfiable"] is True
    r = result(capsys, "codes", "kraft", "--lengths", "1,1,1")
    assert r["satisfiable"] is False


def test_horse_race_entropy(capsys, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)  # bundled data is found by bare name
    assert result(capsys, "entropy", "compute", "--dist", "horse-race.json")["entropy"] == 2.0


@pytest.mark.parametrize("argv,code", [
    (["bogus"], 2),
    (["codes", "kraft"], 2),
    (["codes", "kraft", "--lengths", "1,x"], 2),
    (["codes", "encode", "--scheme", "E2", "e"], 1),
    (["codes", "decode", "--scheme", "E1-bar", "111"], 1),
    (["machine", "index", "--encoding", "0101"], 1),
])
def test_exit_codes(capsys, argv, code):
    assert call(capsys, *argv)[0] == code


def test_usage_error_prints_help(capsys):
    code, _, err = call(capsys, "bogus")
    assert code == 2 and "usage" in err


@pytest.mark.parametrize("leaf", LEAVES)
def test_every_subcommand_has_help(capsys, leaf):
    code, out, _ = call(capsys, *leaf.split(), "--help")
    assert code == 0 and "usage" in out


def test_golden_suite_passes(capsys):
    code, out, _ = call(capsys, "golden")
    rep = load_report(out)["result"]
    n = len(json.loads(data_path("golden.json").read_text())["cases"])
    assert code == 0 and rep["cases"] == n and rep["passed"] == n


def test_tampered_fixture_fails(capsys, tmp_path):
    fixture = json.loads(data_path("golden.json").read_text())
    for case in fixture["cases"]:
        if case["id"] == "classify-E4":
            case["input"]["code"]["D"] = "11"
    path = tmp_path / "golden.json"
    path.write_text(json.dumps(fixture))
    code, out, _ = call(capsys, "golden", "--fixture", str(path))
    rep = load_report(out)["result"]
    assert code == 1 and rep["passed"] == rep["cases"] - 1
    assert [c["id"] for c in rep["results"] if not c["passed"]] == ["classify-E4"]


def test_json_is_byte_deterministic(capsys):
    runs = [call(capsys, "omega", "compute", "--max-len", "10", "--workers", w)[1] for w in ("1", "8", "1")]
    assert runs[0] == runs[1] == runs[2]
    assert load_report(runs[0])["result"]["omega"] == "0.100001111"


def test_seed_and_limits_echoed(capsys):
    rep = load_report(call(capsys, "entropy", "dpi", "--trials", "20", "--seed", "7")[1])
    assert rep["config"]["seed"] == 7 and rep["config"]["trials"] == 20
    assert rep["provenance"]["family_version"] == 1


def test_csv_census_grid(capsys):
    code, out, _ = call(capsys, "census", "--n", "6", "--c", "4", "--grid", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert code == 0 and len(rows) == 7 * 5
    assert all(r["holds"] == "True" for r in rows)


def test_config_file_and_override(capsys, tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"lengths": "1,1,1"}))
    assert result(capsys, "codes", "kraft", "--config", str(cfg))["satisfiable"] is False
    assert result(capsys, "codes", "kraft", "--config", str(cfg), "--lengths", "1,2")["satisfiable"] is True


def test_allocate_jsonl_roundtrip(capsys, tmp_path):
    events = tmp_path / "ev.jsonl"
    events.write_text("".join(json.dumps({"p": p, "x": x}) + "\n" for p, x in
                              [("1100", "01"), ("00110", "11011"), ("000", "1"), ("011101", "11011"),
                               ("111", "11011")]))
    code, out, _ = call(capsys, "coding", "allocate", "--events", str(events), "--format", "jsonl")
    quads = read_quadruples(out.splitlines())
    assert code == 0 and [q.a for q in quads] == ["00000", "000010", "0001", None, "0010"]
    r = result(capsys, "coding", "decode", "--events", str(events), "--addr", "0010")
    assert "11011" in json.dumps(r)


def test_semimeasure_command(capsys, tmp_path):
    f = tmp_path / "mu.json"
    f.write_text(json.dumps([{"x": "0", "delta": "1/4"}, {"x": "1", "delta": "0.011"}]))
    r = result(capsys, "coding", "from-semimeasure", str(f))
    assert r["programs"] == {"0": ["00"], "1": ["01", "100"]}
    f.write_text(json.dumps([{"x": "0", "delta": "3/4"}, {"x": "1", "delta": "1/2"}]))
    assert call(capsys, "coding", "from-semimeasure", str(f))[0] == 1


def test_machine_commands(capsys, tmp_path):
    m = tmp_path / "flip.tm"
    m.write_text("q0 0 1 q1\n")
    enc = result(capsys, "machine", "encode", "--machine", str(m))
    assert enc["encoding"].startswith("1010")
    idx = result(capsys, "machine", "index", "--encoding", enc["encoding"])
    assert result(capsys, "machine", "index", "--i", str(idx["index"]))["encoding"] == enc["encoding"]
    run = result(capsys, "machine", "run", "--machine", str(m), "--input", "0")
    assert run["status"] == "halted" and run["output"] == "1"


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "ait", "codes", "kraft", "--lengths", "1,2,3,3"],
                          capture_output=True, text=True)
    assert proc.returncode == 0 and json.loads(proc.stdout)["result"]["sum"] == "1"


def test_named_example_tables_and_stream_rest(capsys):
    assert result(capsys, "codes", "classify", "--table", "E2")["witness"] == "10"
    assert call(capsys, "codes", "classify", "--table", "A0")[0] == 2
    r = result(capsys, "codes", "decode", "--schemes", "E1-bar,prime", "111110001011110000110100101111100100101")
    assert r["parts"] == ["00101", "11010010"] and r["rest"] == "1111100100101"
