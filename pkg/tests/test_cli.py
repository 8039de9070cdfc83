import csv
import io
import json
import subprocess
import sys

import pytest

from diw.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_catalog_verify_example(capsys):
    code, out, _ = run(capsys, "catalog", "verify", "sec6-ex1", "--horizon", "8")
    assert code == 0
    assert "eu_stretch_test" in out and "sf_singleton_test" in out


def test_catalog_verify_all_json(capsys):
    code, out, _ = run(capsys, "catalog", "verify", "all", "--format", "json")
    assert code == 0
    reports = json.loads(out)
    assert len(reports) == 10 and all(r["ok"] for r in reports)


def test_catalog_list(capsys):
    code, out, _ = run(capsys, "catalog", "list")
    assert code == 0 and "sec7-antihom" in out


def test_profile_csv_example(capsys):
    code, out, _ = run(capsys, "profile", "--set", "evens", "--weight", "identity",
                       "--checkpoints", "10,100,1000", "--format", "csv")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["ratio_num"], r["ratio_den"]) for r in rows] == [("1", "2")] * 3


def test_eu_dyadic_example(capsys):
    code, out, _ = run(capsys, "test", "eu-dyadic", "--weight", '{"kind":"identity"}', "--levels", "0..20",
                       "--format", "json", "--details")
    assert code == 0
    v = json.loads(out)
    assert v["status"] == "HOLDS_AT_HORIZON"
    levels = v["details"]["levels"]
    assert len(levels) == 21
    assert all(lv["ratio"] == {"num": 1, "den": 1} for lv in levels.values())


def test_expect_mismatch_exits_one(capsys):
    code, _, _ = run(capsys, "test", "membership", "--set", "evens", "--weight", "identity", "--expect", "holds")
    assert code == 1
    code, _, _ = run(capsys, "test", "membership", "--set", "evens", "--weight", "identity", "--expect", "fails")
    assert code == 0


@pytest.mark.parametrize("argv", [
    ["test", "jump", "--weight", "bogus"],
    ["test", "jump", "--weight", '{"kind":'],
    ["test", "eu-dyadic", "--weight", "identity", "--levels", "3-4"],
    ["profile", "--set", "evens", "--weight", '{"kind":"constant","value":0}', "--checkpoints", "5"],
    ["construct", "weight-count-of", "--set", "[1,2,3]", "--horizon", "100"],
    ["catalog", "verify", "nope"],
])
def test_input_errors_exit_two(capsys, argv):
    code, _, err = run(capsys, *argv)
    assert code == 2 and err.startswith("error:")


def test_no_witness_exits_one(capsys):
    code, _, err = run(capsys, "construct", "liminf-set", "--weight", "identity")
    assert code == 1 and "no result" in err


def test_construct_antichain_json(capsys):
    code, out, _ = run(capsys, "construct", "antichain", "--weight", "identity", "--format", "json")
    assert code == 0
    bundle = json.loads(out)
    assert bundle["replay_failures"] == []
    assert len(bundle["margins"]) >= 6


def test_construct_katetov_weight(capsys):
    code, out, _ = run(capsys, "construct", "katetov-weight", "--format", "json")
    assert code == 0
    assert json.loads(out)["sequences"]["alpha"] == [1, 4, 181441]


def test_measures_check_and_weight(capsys, tmp_path):
    code, out, _ = run(capsys, "measures", "farah", "--weight", "identity", "--levels", "6", "--format", "json")
    assert code == 0
    path = tmp_path / "ms.json"
    path.write_text(out)
    code, out, _ = run(capsys, "measures", "check", "--measures", str(path), "--levels", "6", "--format", "json")
    assert code == 0
    assert json.loads(out)["nic"]["iii"]["status"] == "FAILS_AT_HORIZON"
    code, out, _ = run(capsys, "measures", "weight", "--measures", str(path), "--levels", "6", "--format", "csv")
    assert code == 0 and out.startswith("n,weight")


def test_output_file(capsys, tmp_path):
    target = tmp_path / "p.csv"
    code, out, _ = run(capsys, "profile", "--set", "odds", "--weight", "identity", "--checkpoints", "4",
                       "--format", "csv", "--output", str(target))
    assert code == 0 and out == ""
    assert target.read_text().splitlines()[1] == "4,2,4,1,2,0.500000"


def test_default_horizon_env(capsys, monkeypatch):
    monkeypatch.setenv("DIW_DEFAULT_HORIZON", "64")
    code, out, _ = run(capsys, "profile", "--set", "evens", "--weight", "identity", "--format", "json")
    assert code == 0
    assert max(r["n"] for r in json.loads(out)["rows"]) <= 64
    monkeypatch.setenv("DIW_DEFAULT_HORIZON", "x")
    code, _, _ = run(capsys, "profile", "--set", "evens", "--weight", "identity")
    assert code == 2


def test_usage_error_exits_two():
    proc = subprocess.run([sys.executable, "-m", "diw.cli", "frobnicate"], capture_output=True, text=True)
    assert proc.returncode == 2
