import csv
import io
import json
import subprocess
import sys
import warnings

import pytest
from gmpy2 import mpq

from mirrorgw import cli
from mirrorgw.hyper import CIGeometry
from mirrorgw.invariants import InvariantQuery, gw_invariant
from mirrorgw.series import to_q

QUINTIC_ARGS = ["--n", "5", "--a", "5", "--c", "1,1,1", "--degree", "3"]


def run(argv, capsys):
    code = cli.run_cli(argv)
    out, err = capsys.readouterr()
    return code, out, err


def test_table_json_schema_and_values(capsys):
    code, out, _ = run(QUINTIC_ARGS, capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["geometry"] == {"n": 5, "a": [5]}
    assert doc["meta"]["K"] == 3 and doc["meta"]["version"]
    rows = doc["results"]
    assert [r["d"] for r in rows] == [0, 1, 2, 3]
    assert [r["bps"] for r in rows] == ["5", "2875", "4874000", "8564572125"]
    for r in rows:
        assert set(r) == {"d", "N", "b", "c", "gw", "bps"}
        assert isinstance(r["gw"], str)


def test_json_round_trip_recomputes(capsys):
    argv = ["--n", "5", "--a", "3", "--c", "2,2,1", "--b", "0,0,0", "--degree", "2"]
    code, out, _ = run(argv, capsys)
    assert code == 0
    doc = json.loads(out)
    geom = CIGeometry(doc["geometry"]["n"], tuple(doc["geometry"]["a"]))
    for r in doc["results"]:
        q = InvariantQuery(tuple(r["b"]), tuple(r["c"]), r["d"])
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            expected = gw_invariant(geom, q, doc["meta"]["K"])
        assert to_q(r["gw"]) == expected
    assert to_q(doc["results"][1]["gw"]) == 45


def test_rationals_serialized_exactly(capsys):
    code, out, _ = run(["--n", "5", "--a", "5", "--c", "1,1,1", "--b", "0,0,0", "--degree", "1"], capsys)
    assert code == 0
    assert cli._rat(mpq(-3, 6)) == "-1/2"
    assert cli._rat(mpq(10, 5)) == "2"
    assert "." not in out.replace('"version": "0.1.0"', "")


def test_deterministic_output(capsys):
    first = run(QUINTIC_ARGS, capsys)[1]
    second = run(QUINTIC_ARGS, capsys)[1]
    assert first == second


def test_csv_header_and_rows(capsys):
    code, out, _ = run(QUINTIC_ARGS + ["--format", "csv"], capsys)
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0] == ["n", "a", "d", "N", "b", "c", "gw", "bps"]
    assert rows[2] == ["5", "5", "1", "3", "0 0 0", "1 1 1", "2875", "2875"]
    assert len(rows) == 5


def test_out_file(tmp_path, capsys):
    path = tmp_path / "table.json"
    code, out, _ = run(QUINTIC_ARGS + ["--out", str(path)], capsys)
    assert code == 0 and out == ""
    assert json.loads(path.read_text())["results"][2]["gw"] == "4876875"


def test_preset_cubic_passes(capsys):
    code, out, _ = run(["--preset", "cubic"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] is True
    assert len(doc["results"]) == 13
    assert all(r["match"] for r in doc["results"])


def test_preset_verification_failure_exit_code(capsys, monkeypatch):
    table = list(cli.CUBIC_INVARIANTS)
    cs, d, val = table[0]
    table[0] = (cs, d, val + 1)
    monkeypatch.setattr(cli, "CUBIC_INVARIANTS", table)
    code, out, _ = run(["--preset", "cubic"], capsys)
    assert code == 1
    doc = json.loads(out)
    assert doc["ok"] is False
    assert doc["results"][0]["match"] is False


def test_preset_table_with_threads(capsys, monkeypatch):
    code, serial, _ = run(["--preset", "table4", "--degree", "1"], capsys)
    assert code == 0
    monkeypatch.setenv("MIRRORGW_THREADS", "2")
    code, parallel, _ = run(["--preset", "table4", "--degree", "1"], capsys)
    assert code == 0
    assert serial == parallel
    assert json.loads(serial)["ok"] is True


def test_suite_trees(capsys):
    code, out, _ = run(["--suite", "trees"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["ok"] and doc["checks"] == 8 and doc["failures"] == []


def test_suite_csv(capsys):
    code, out, _ = run(["--suite", "trees", "--format", "csv"], capsys)
    assert code == 0
    assert out.splitlines()[0] == "suite,ok,checks,failures"


@pytest.mark.parametrize(
    "argv",
    [
        [],
        ["--n", "5", "--a", "5"],
        ["--n", "5", "--a", "5", "--c", "1,1,1", "--b", "0,0"],
        ["--n", "5", "--a", "5", "--c", "1,1,x"],
        ["--n", "5", "--a", "5", "--c", "1,1,1", "--degree", "-1"],
        ["--n", "5", "--a", "5", "--c", "1,1,1", "--degree", "3", "--K", "2"],
        ["--n", "5", "--a", "5", "--c", "1,1,1", "--points", "4"],
        ["--n", "5", "--a", "5", "--c", "4,0,0"],
        ["--n", "5", "--a", "6", "--c", "1,1,1"],
        ["--suite", "nonexistent"],
        ["--preset", "cubic", "--suite", "trees"],
        ["--format", "xml", "--suite", "trees"],
    ],
)
def test_usage_errors(argv, capsys):
    code, out, err = run(argv, capsys)
    assert code == 2
    assert out == ""
    assert "error" in err


def test_help_exits_cleanly(capsys):
    assert cli.run_cli(["--help"]) == 0


def test_module_entry_point():
    proc = subprocess.run(
        [sys.executable, "-m", "mirrorgw.cli", "--suite", "trees"],
        capture_output=True,
        text=True,
        check=False,
    )
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["ok"] is True


def test_suite_aliases(capsys):
    code, out, _ = run(["--suite", "theorem4"], capsys)
    assert code == 0
    doc = json.loads(out)
    assert doc["suite"] == "projective" and doc["ok"]
    assert cli.SUITE_ALIASES == {"lemma2.3": "identities", "appendixB": "combinatorics", "theorem4": "projective"}
