import json
import os
import subprocess
import sys

import pytest

from isocr import bounds
from isocr import protocols as P
from isocr.cli import main, parse_range, UsageError
from isocr.strategy_io import save_strategy, strategy_to_dict


def run(*args, env=None):
    e = dict(os.environ)
    e.pop("ISOCR_OUTPUT_DIR", None)
    e.update(env or {})
    return subprocess.run([sys.executable, "-m", "isocr", *args], capture_output=True, text=True, env=e)


def test_parse_range():
    assert parse_range("0:1:11")[0] == 0 and parse_range("0:1:11")[-1] == 1
    assert len(parse_range("0:1:101")) == 101
    assert parse_range("0.5") == [0.5]
    assert parse_range("0.1,0.2") == [0.1, 0.2]
    assert parse_range("0.3:0.3:1") == [0.3]
    for bad in ("a:b:c", "0:1", "0:1:0", "0:1:1"):
        with pytest.raises(UsageError):
            parse_range(bad)


def test_bounds_quantum_101_rows():
    r = run("bounds", "--model", "quantum", "--rho", "0:1:101", "--gamma", "0.05")
    assert r.returncode == 0
    lines = r.stdout.splitlines()
    assert lines[0] == "model,rho,gamma,value"
    assert len(lines) == 102
    assert lines[1] == f"quantum,0,0.05,{format(bounds.bound_quantum_lb(0, 0.05, 1), '.12g')}"


def test_bounds_capacity_ends_at_two(capsys):
    assert main(["bounds", "--model", "capacity", "--rho", "0:1:11"]) == 0
    rows = capsys.readouterr().out.splitlines()[1:]
    assert len(rows) == 11
    assert rows[-1] == "capacity,1,,2"


def test_bounds_free_single_value(capsys):
    assert main(["bounds", "--model", "free", "--k", "10", "--rho", "0.5"]) == 0
    rows = capsys.readouterr().out.splitlines()
    assert rows[1] == "free,0.5,," + format(2 ** (-10 / 3), ".12g")


def test_bounds_json_mirrors_csv(capsys):
    main(["bounds", "--model", "superdense", "--rho", "0:1:5", "--format", "json"])
    doc = json.loads(capsys.readouterr().out)
    main(["bounds", "--model", "superdense", "--rho", "0:1:5"])
    csv_rows = capsys.readouterr().out.splitlines()[1:]
    assert [float(r.split(",")[3]) for r in csv_rows] == [r["value"] for r in doc["rows"]]
    assert doc["meta"]["model"] == "superdense"


def test_bounds_output_dir_env(tmp_path):
    r = run("bounds", "--model", "free", "--model", "capacity", "--rho", "0:1:3", env={"ISOCR_OUTPUT_DIR": str(tmp_path)})
    assert r.returncode == 0 and r.stdout == ""
    assert sorted(p.name for p in tmp_path.iterdir()) == ["capacity.csv", "free.csv"]


def test_bounds_unwritable_is_io_error(tmp_path):
    blocker = tmp_path / "file"
    blocker.write_text("x")
    assert main(["bounds", "--model", "free", "--output-dir", str(blocker / "sub")]) == 3


@pytest.mark.parametrize("args", [
    ["bounds", "--model", "classical"],
    ["bounds", "--rho", "2"],
    ["bounds", "--model", "quantum", "--gamma", "1.5"],
    ["verify", "--trials", "0"],
])
def test_usage_errors(args):
    assert main(args) == 2


def test_argparse_errors_exit_two():
    r = run("bounds", "--model", "nope")
    assert r.returncode == 2


def test_bounds_deterministic(tmp_path):
    a = run("bounds", "--model", "classical", "--model", "quantum", "--rho", "0:1:21", "--gamma", "0.01,0.1")
    b = run("bounds", "--model", "classical", "--model", "quantum", "--rho", "0:1:21", "--gamma", "0.01,0.1")
    assert a.returncode == 0 and a.stdout == b.stdout


def test_verify_single_trial(tmp_path):
    report = tmp_path / "r.json"
    assert main(["verify", "--suite", "hypercontractivity", "--trials", "1", "--seed", "1", "--report", str(report)]) == 0
    doc = json.loads(report.read_text())
    assert doc["passed"]
    assert doc["suites"][0]["min_slack"] >= -1e-9


def test_verify_tamper_exits_one():
    r = run("verify", "--suite", "hypercontractivity", "--trials", "20", "--tamper", "0.4")
    assert r.returncode == 1
    doc = json.loads(r.stdout)
    assert not doc["passed"]
    assert "witness" in doc["suites"][0]["failures"][0]
    assert "FAIL hypercontractivity" in r.stderr


def test_verify_tamper_hidden_from_help():
    assert "tamper" not in run("verify", "--help").stdout


def test_verify_csv(capsys):
    assert main(["verify", "--suite", "holder", "--trials", "5", "--format", "csv"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0].startswith("suite,passed")
    assert lines[1].startswith("holder,1,5,")


def test_protocol_basis(tmp_path, capsys):
    path = tmp_path / "basis.json"
    save_strategy(path, P.basis_protocol(1), 1)
    assert main(["protocol", str(path), "--rho", "0.5"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["model"] == "free" and rec["n"] == 1 and rec["t"] == 0
    assert rec["success"] == pytest.approx(0.75, abs=1e-12)
    assert rec["min_entropy"] == pytest.approx(1.0)
    assert rec["bound"] == pytest.approx(2 ** (-1 / 3), abs=1e-12)


def test_protocol_invalid_names_invariant(tmp_path):
    d = strategy_to_dict(P.basis_protocol(1), 1)
    d["alice"]["1"][1][1] = [0.5, 0.0]
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(d))
    r = run("protocol", str(path), "--rho", "0.5")
    assert r.returncode == 2
    assert "completeness" in r.stderr


def test_protocol_missing_file(tmp_path):
    assert main(["protocol", str(tmp_path / "none.json"), "--rho", "0.5"]) == 3


def test_protocol_quantum_t_zero_equals_free(tmp_path, capsys):
    from test_protocols import scalar_quantum_form

    alice, bob = P.basis_protocol(1)
    save_strategy(tmp_path / "f.json", (alice, bob), 1)
    save_strategy(tmp_path / "q.json", scalar_quantum_form(alice, bob), 1)
    main(["protocol", str(tmp_path / "f.json"), "--rho", "0.3"])
    free = json.loads(capsys.readouterr().out)
    main(["protocol", str(tmp_path / "q.json"), "--rho", "0.3"])
    quant = json.loads(capsys.readouterr().out)
    assert quant["model"] == "quantum" and quant["t"] == 0
    assert quant["success"] == pytest.approx(free["success"], abs=1e-10)


def test_protocol_classical(tmp_path, capsys):
    save_strategy(tmp_path / "c.json", P.full_communication_strategy(2), 2)
    assert main(["protocol", str(tmp_path / "c.json"), "--rho", "0.5"]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["success"] == pytest.approx(1.0) and rec["min_entropy"] == pytest.approx(2.0)
    assert rec["t"] == 2


@pytest.mark.parametrize("rho, expected", [(1.0, 1.0), (0.0, 0.5)])
def test_optimize_endpoints(tmp_path, capsys, rho, expected):
    out = tmp_path / "best.json"
    assert main(["optimize", "--rho", str(rho), "--n", "1", "--k", "1", "--restarts", "2",
                 "--iters", "20", "--output", str(out)]) == 0
    rec = json.loads(capsys.readouterr().out)
    assert rec["value"] == pytest.approx(expected, abs=1e-9)
    assert main(["protocol", str(out), "--rho", str(rho)]) == 0
    assert json.loads(capsys.readouterr().out)["success"] == pytest.approx(expected, abs=1e-9)


def test_optimize_default_dir(tmp_path):
    r = run("optimize", "--rho", "0.5", "--restarts", "1", "--iters", "5", env={"ISOCR_OUTPUT_DIR": str(tmp_path)})
    assert r.returncode == 0
    assert [p.name for p in tmp_path.iterdir()] == ["seesaw_rho0.5_n1_k1.json"]


def test_optimize_infeasible():
    assert main(["optimize", "--rho", "0.5", "--n", "1", "--k", "2"]) == 2
    assert main(["optimize", "--rho", "0.5", "--n", "4", "--k", "1"]) == 2
