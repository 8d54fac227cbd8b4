"""Command-line surface: build/verify/sweep, exit codes, determinism."""

from __future__ import annotations

import json

import pytest

from cdslab.cli import main


def _read(path):
    return path.read_bytes()


def test_version_flag(capsys):
    assert main(["--version"]) == 0


def test_build_verify_gh_cds(tmp_path):
    desc = tmp_path / "d.json"
    rep = tmp_path / "r.json"
    assert main(["build", "--chain", "gh,cds", "--fn", "and",
                 "--out", str(desc)]) == 0
    obj = json.loads(desc.read_text())
    assert obj["format"] == "cdslab-descriptor"
    assert obj["chain"] == ["gh", "cds"]
    assert "gh_strategy" in obj["artifacts"]
    assert main(["verify", str(desc), "--out", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["status"] == "pass"
    assert report["report"]["perfect"] is True


def test_verify_corrupted_descriptor_gives_witness(tmp_path):
    desc = tmp_path / "d.json"
    rep = tmp_path / "r.json"
    assert main(["build", "--chain", "gh,frouting", "--fn", "and",
                 "--out", str(desc)]) == 0
    obj = json.loads(desc.read_text())
    # flip one tap so some input routes to the wrong side
    taps = obj["artifacts"]["gh_strategy"]["alice"]
    taps["0"], taps["1"] = taps["1"], taps["0"]
    desc.write_text(json.dumps(obj))
    assert main(["verify", str(desc), "--out", str(rep)]) == 1
    report = json.loads(rep.read_text())
    assert report["status"] == "fail"
    assert report["witness"]["inputs"]  # concrete failing input pairs


def test_verify_unreadable_descriptor(tmp_path):
    rep = tmp_path / "r.json"
    assert main(["verify", str(tmp_path / "missing.json"),
                 "--out", str(rep)]) == 1
    assert json.loads(rep.read_text())["status"] == "fail"


def test_verify_wrong_format_file(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"format": "something-else"}))
    rep = tmp_path / "r.json"
    assert main(["verify", str(bad), "--out", str(rep)]) == 1


def test_chain_validation_exit_codes(tmp_path):
    assert main(["build", "--chain", "cds,gh", "--fn", "and"]) == 2
    assert main(["build", "--chain", "gh,nope", "--fn", "and"]) == 2
    assert main(["build", "--chain", "gh,cds"]) == 2  # no --fn/--table
    assert main(["build", "--chain", "gh,cds", "--table", "1:1"]) == 2
    assert main(["build", "--chain", "dre,psm", "--fn", "and"]) == 2  # dre wants qr
    assert main(["not-a-command"]) == 2


def test_budget_exit_code(tmp_path):
    assert main(["build", "--chain", "psm,cds", "--fn", "ip", "--nx", "4",
                 "--out", str(tmp_path / "d.json")]) == 3


def test_build_deterministic_bytes(tmp_path):
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    args = ["build", "--chain", "span,cds", "--fn", "eq", "--p", "3",
            "--variant", "rand"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert _read(a) == _read(b)


def test_verify_deterministic_bytes(tmp_path):
    desc = tmp_path / "d.json"
    assert main(["build", "--chain", "dre,psm,psqm,cdqs", "--fn", "qr",
                 "--p", "5", "--out", str(desc)]) == 0
    r1, r2 = tmp_path / "r1.json", tmp_path / "r2.json"
    assert main(["verify", str(desc), "--out", str(r1)]) == 0
    assert main(["verify", str(desc), "--out", str(r2)]) == 0
    assert _read(r1) == _read(r2)


def test_sweep_csv(tmp_path):
    out = tmp_path / "sweep.csv"
    assert main(["sweep", "--nx", "1", "--ny", "1", "--max-pipes", "3",
                 "--out", str(out)]) == 0
    lines = out.read_text().strip().split("\n")
    assert lines[0] == "index,table,pipes,method"
    assert len(lines) == 17
    pipes = [int(line.split(",")[2]) for line in lines[1:]]
    assert max(pipes) <= 3


def test_sweep_equal_seeds_identical_bytes(tmp_path):
    a, b = tmp_path / "a.csv", tmp_path / "b.csv"
    args = ["sweep", "--nx", "1", "--ny", "1", "--max-pipes", "3", "--seed", "7"]
    assert main(args + ["--out", str(a)]) == 0
    assert main(args + ["--out", str(b)]) == 0
    assert _read(a) == _read(b)


def test_sweep_json_format(tmp_path):
    out = tmp_path / "sweep.json"
    assert main(["sweep", "--nx", "1", "--ny", "1", "--format", "json",
                 "--out", str(out)]) == 0
    obj = json.loads(out.read_text())
    assert obj["format"] == "cdslab-sweep"
    assert len(obj["results"]) == 16


def test_sweep_size_guard():
    assert main(["sweep", "--nx", "3", "--ny", "2"]) == 2


def test_table_function_chain(tmp_path):
    desc = tmp_path / "d.json"
    rep = tmp_path / "r.json"
    # 1:1:6 packs the truth table of xor
    assert main(["build", "--chain", "gh,cds,cdqs", "--table", "1:1:6",
                 "--out", str(desc)]) == 0
    assert main(["verify", str(desc), "--out", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["status"] == "pass"
    assert report["report"]["worst_infidelity"] <= 1e-9


def test_verify_csv_format(tmp_path):
    desc = tmp_path / "d.json"
    rep = tmp_path / "r.csv"
    assert main(["build", "--chain", "gh,cds", "--fn", "xor",
                 "--out", str(desc)]) == 0
    assert main(["verify", str(desc), "--format", "csv",
                 "--out", str(rep)]) == 0
    lines = rep.read_text().strip().split("\n")
    assert lines[0] == "key,value"
    assert any(line.startswith("status,") for line in lines)


def test_stdout_output(capsys):
    assert main(["sweep", "--nx", "1", "--ny", "0"]) == 0
    out = capsys.readouterr().out
    assert out.startswith("index,table,pipes,method")


@pytest.mark.parametrize("chain,fn,extra", [
    ("gh,cds", "and", []),
    ("gh,frouting", "xor", []),
    ("gh,frouting,cdqs", "and", []),
    ("span,cds", "or", ["--p", "3"]),
    ("psm,cds", "index", []),
    ("psm,psqm", "and", []),
])
def test_every_listed_edge_passes(tmp_path, chain, fn, extra):
    desc = tmp_path / "d.json"
    rep = tmp_path / "r.json"
    assert main(["build", "--chain", chain, "--fn", fn, *extra,
                 "--out", str(desc)]) == 0
    assert main(["verify", str(desc), "--out", str(rep)]) == 0
    assert json.loads(rep.read_text())["status"] == "pass"


def test_cds_cdqs_frouting_chain(tmp_path):
    desc = tmp_path / "d.json"
    rep = tmp_path / "r.json"
    assert main(["build", "--chain", "gh,cds,cdqs,frouting", "--fn", "and",
                 "--out", str(desc)]) == 0
    assert main(["verify", str(desc), "--out", str(rep)]) == 0
    report = json.loads(rep.read_text())
    assert report["status"] == "pass"
    assert report["kind"] == "frouting"
