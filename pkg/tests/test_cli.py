import csv
import io
import json
import math
import subprocess
import sys

import pytest

from logitlab.cli import run, sweep
from logitlab.generators import gen_dominant, gen_lbpot


def call(*argv):
    out, err = io.StringIO(), io.StringIO()
    code = run(list(argv), out, err)
    return code, out.getvalue(), err.getvalue()


@pytest.fixture
def files(tmp_path):
    paths = {}
    for name, argv in {
        "ring4": ["ring", "--n", "4"],
        "lbpot": ["lbpot", "--n", "4", "--g", "2", "--l", "1"],
        "dom": ["dominant", "--n", "2", "--m", "2"],
        "rand": ["random", "--n", "2", "--m", "3", "--seed", "5"],
    }.items():
        p = tmp_path / f"{name}.game.json"
        code, _, err = call("generate", *argv, "--out", str(p))
        assert code == 0, err
        paths[name] = str(p)
    return paths


def test_no_arguments_is_usage_error():
    code, out, err = call()
    assert code == 1 and out == "" and "usage" in err


def test_console_script_entry():
    proc = subprocess.run([sys.executable, "-m", "logitlab.cli"], capture_output=True, text=True)
    assert proc.returncode == 1 and "usage" in proc.stderr


@pytest.mark.parametrize(
    "argv",
    [
        ["mix", "--game", "nonexistent.json", "--beta", "1"],
        ["generate", "ring"],
        ["generate", "bogus"],
        ["mix", "--beta", "1"],
    ],
)
def test_usage_and_io_errors(argv):
    assert call(*argv)[0] == 1


def test_bad_parameters(files):
    assert call("mix", "--game", files["ring4"], "--beta", "-1")[0] == 1
    assert call("mix", "--game", files["ring4"], "--beta", "1", "--eps", "1.5")[0] == 1
    assert call("sweep", "--game", files["ring4"], "--betas", "")[0] == 1
    assert call("sweep", "--game", files["ring4"], "--betas", ",")[0] == 1
    assert call("simulate", "--game", files["ring4"], "--beta", "1", "--mode", "coupling")[0] == 1


def test_budget_and_hypothesis_errors(files, monkeypatch):
    monkeypatch.setenv("LOGITLAB_BUDGET", "8")
    code, _, err = call("mix", "--game", files["ring4"], "--beta", "1")
    assert code == 2 and "error" in err
    monkeypatch.delenv("LOGITLAB_BUDGET")
    # a set holding most of the mass breaks pi(R) <= 1/2
    assert call("bottleneck", "--game", files["dom"], "--beta", "5", "--set", "0,0")[0] == 2
    assert call("mix", "--game", files["lbpot"], "--beta", "4", "--cap", "10")[0] == 2


def test_mix_output(files):
    code, out, _ = call("mix", "--game", files["ring4"], "--beta", "1", "--eps", "0.25")
    assert code == 0
    doc = json.loads(out)
    assert set(doc) == {"version", "prng", "config", "result"}
    res = doc["result"]
    assert res["t_mix"] == 14 and isinstance(res["t_mix"], int)
    assert res["d"][0] > 0.25 >= res["d"][-1]


def test_bounds_all_satisfied(files):
    code, out, _ = call("bounds", "--game", files["lbpot"], "--beta", "2")
    assert code == 0
    entries = json.loads(out)["result"]["entries"]
    applicable = [e for e in entries if e["applicable"]]
    assert applicable and all(e["satisfied"] is True for e in applicable)
    code, out, _ = call("bounds", "--game", files["lbpot"], "--beta", "2", "--format", "csv")
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:4] == ["id", "kind", "target", "applicable"]
    assert len(rows) == len(entries) + 1


def test_other_commands(files, tmp_path):
    assert json.loads(call("zeta", "--game", files["lbpot"])[1])["result"]["zeta"] == 2
    res = json.loads(call("cutwidth", "--game", files["ring4"], "--ordering", "0,2,1,3")[1])["result"]
    assert res["cutwidth"] == 2 and res["given_ordering"]["width"] == 4
    assert json.loads(call("cutwidth", "--n", "4", "--edges", "0-1,1-2,2-3,3-0,0-2,1-3")[1])["result"]["cutwidth"] == 4
    res = json.loads(call("analyze", "--game", files["rand"], "--beta", "1")[1])["result"]
    assert res["reversible"] and res["gibbs_tv"] <= 1e-10
    res = json.loads(call("bottleneck", "--game", files["ring4"], "--beta", "1", "--set", "1,1,1,1")[1])["result"]
    assert res["ratio"] == pytest.approx(1 / (1 + math.exp(2)), rel=1e-9)
    code, out, _ = call("simulate", "--game", files["ring4"], "--beta", "1", "--x", "0,0,0,0", "--y", "1,1,1,1", "--trials", "50", "--t", "5", "--csv", str(tmp_path / "c.csv"))
    assert code == 0 and json.loads(out)["result"]["censored"] == 0
    assert (tmp_path / "c.csv").read_text().startswith("trial,tau,censored,stream\n")
    code, out, _ = call("simulate", "--game", files["ring4"], "--beta", "1", "--mode", "hitting", "--start", "0,1,0,1", "--trials", "20")
    assert code == 0 and json.loads(out)["result"]["mode"] == "hitting"


def test_sweep_slope_band(tmp_path, files):
    summary = tmp_path / "s.json"
    code, out, _ = call("sweep", "--game", files["lbpot"], "--betas", "0.5,1,1.5,2,2.5,3,3.5,4", "--summary", str(summary))
    assert code == 0
    rows = list(csv.reader(io.StringIO(out)))
    assert rows[0][:3] == ["beta", "t_mix", "t_rel"] and len(rows) == 9
    slope = json.loads(summary.read_text())["result"]["slope"]
    assert 1.0 <= slope <= 2.4


def test_dominant_sweep_is_flat():
    res = sweep(gen_dominant(2, 2), [5, 10, 20, 40])
    t = [r[1] for r in res.rows]
    assert max(t) / min(t) <= 4


def test_sweep_reproduces_library_value():
    res = sweep(gen_lbpot(4, 2, 1), [0.5, 4.0])
    assert [r[1] for r in res.rows] == [6, 793]


def command_matrix(files, tmp_path):
    return [
        ["generate", "random", "--n", "3", "--m", "2", "--seed", "9"],
        ["analyze", "--game", files["rand"], "--beta", "1"],
        ["mix", "--game", files["ring4"], "--beta", "1"],
        ["zeta", "--game", files["rand"]],
        ["cutwidth", "--game", files["ring4"]],
        ["bottleneck", "--game", files["ring4"], "--beta", "1"],
        ["bounds", "--game", files["lbpot"], "--beta", "1"],
        ["bounds", "--game", files["lbpot"], "--beta", "1", "--format", "csv"],
        ["simulate", "--game", files["ring4"], "--beta", "1", "--x", "0,0,0,0", "--y", "1,1,1,1", "--trials", "30", "--seed", "4", "--t", "3"],
        ["simulate", "--game", files["ring4"], "--beta", "1", "--mode", "hitting", "--trials", "30", "--seed", "4"],
        ["sweep", "--game", files["dom"], "--betas", "1,2"],
    ]


def test_byte_identical_output(files, tmp_path):
    for argv in command_matrix(files, tmp_path):
        first = call(*argv)
        second = call(*argv)
        assert first[0] == 0, (argv, first[2])
        assert first[1].encode() == second[1].encode(), argv


def test_output_files_identical(files, tmp_path):
    target = tmp_path / "a.json"
    seen = []
    for _ in range(2):
        assert call("simulate", "--game", files["ring4"], "--beta", "2", "--mode", "hitting", "--trials", "10", "--out", str(target))[0] == 0
        seen.append(target.read_bytes())
    assert seen[0] == seen[1]
