import csv
import json
import subprocess
import sys

import pytest

import faircut.cli as cli
from faircut.cli import main, read_manifest
from faircut.errors import ConvergenceError


def run(tmp_path, *args):
    return main([*args, "--out", str(tmp_path)])


def load(path):
    return json.loads(path.read_text())


def rows(path):
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# manifest ")
    return list(csv.DictReader(lines[1:]))


def test_solve_exact_petersen(tmp_path):
    assert run(tmp_path, "solve", "--family", "petersen", "--method", "exact") == 0
    rep = load(tmp_path / "solve.json")
    assert rep["value"] == pytest.approx(0.8, abs=1e-9) and rep["rational"] == "4/5"
    assert rep["manifest"]["command"] == "solve" and "timestamp" not in json.dumps(rep["manifest"])
    assert "4/5" in (tmp_path / "solve.txt").read_text()


def test_solve_sdp_k4(tmp_path):
    assert run(tmp_path, "solve", "--family", "complete:4", "--method", "sdp", "--rounding-samples", "2000") == 0
    rep = load(tmp_path / "solve.json")
    assert rep["hr_value"] == pytest.approx(0.60817, abs=1e-4)
    assert 0 < rep["rounding"]["empirical_min"] <= 1


def test_solve_qaoa_grid(tmp_path):
    assert run(tmp_path, "solve", "--family", "complete:4", "--method", "qaoa", "--k", "1",
               "--mode", "standard", "--grid", "400") == 0
    assert load(tmp_path / "solve.json")["value"] == pytest.approx(0.6160, abs=5e-4)


def test_solve_qaoa_trained_file_input(tmp_path):
    gfile = tmp_path / "tri.txt"
    gfile.write_text("0 1\n1 2\n0 2\n")
    assert main(["solve", str(gfile), "--method", "qaoa", "--k", "1", "--seeds", "2", "--max-iters", "60",
                 "--shots", "500", "--write-distribution", "--out", str(tmp_path)]) == 0
    rep = load(tmp_path / "solve.json")
    assert 0 < rep["value"] <= 2 / 3 + 1e-9 and len(rep["runs"]) == 2
    assert (tmp_path / "distribution.json").exists()


def test_exit_codes(tmp_path, monkeypatch):
    assert run(tmp_path, "solve", str(tmp_path / "missing.txt"), "--method", "exact") == 2
    assert run(tmp_path, "solve", "--method", "exact") == 2
    assert run(tmp_path, "solve", "--family", "nosuch:3", "--method", "exact") == 2
    assert run(tmp_path, "solve", "--family", "complete:30", "--method", "qaoa") == 4

    def boom(*a, **k):
        raise ConvergenceError("diverged")

    monkeypatch.setattr(cli, "solve_exact", boom)
    assert run(tmp_path, "solve", "--family", "petersen", "--method", "exact") == 3


def test_determinism_and_rerun(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    args = ["solve", "--family", "cycle:5", "--method", "qaoa", "--k", "2", "--seeds", "2", "--max-iters", "50",
            "--seed", "11", "--jobs", "1"]
    assert main([*args, "--out", str(a)]) == 0
    first = (a / "solve.json").read_bytes()
    assert main([*args, "--out", str(a)]) == 0
    assert (a / "solve.json").read_bytes() == first
    # only the recorded output directory differs between locations and job counts
    args[-1] = "2"
    assert main([*args, "--out", str(b)]) == 0
    ra, rb = load(a / "solve.json"), load(b / "solve.json")
    ra.pop("manifest"), rb.pop("manifest")
    assert ra == rb
    assert main(["rerun", str(a / "solve.json")]) == 0
    assert (a / "solve.json").read_bytes() == first
    assert main(["rerun", str(tmp_path / "nothing.json")]) == 2


def test_table1_skip_row(tmp_path):
    assert run(tmp_path, "table1", "--graphs", "complete:3,complete:30", "--k-max", "2", "--seeds", "2",
               "--resolution", "60") == 0
    out = {r["graph"]: r for r in rows(tmp_path / "table1.csv")}
    assert float(out["complete:3"]["eta_bar"]) == pytest.approx(2 / 3)
    assert float(out["complete:3"]["q1"]) == pytest.approx(2 / 3, abs=1e-4)
    assert out["complete:30"]["status"].startswith("skipped")


def test_benchmark(tmp_path):
    assert run(tmp_path, "benchmark", "--clique", "4", "--instances", "0") == 0
    assert rows(tmp_path / "benchmark.csv") == []
    header = (tmp_path / "benchmark.csv").read_text().splitlines()[1]
    assert header.startswith("instance,n,n_edges,omega")
    assert run(tmp_path, "benchmark", "--clique", "4", "--instances", "1", "--n-range", "8,8", "--seeds", "1",
               "--max-iters", "30", "--shots", "2000") == 0
    (r,) = rows(tmp_path / "benchmark.csv")
    assert r["status"] == "ok"
    assert 0 < float(r["ratio_exact"]) <= 1 + 1e-9
    import math
    assert float(r["bound"]) == pytest.approx(math.acos(-1 / 3) / math.pi / float(r["eta_bar"]), rel=1e-9)
    assert abs(float(r["q_shots"]) - float(r["q_exact"])) <= float(r["hoeffding_eps"])


def test_studies(tmp_path, capsys):
    assert run(tmp_path, "studies", "shot-budget", "--eps", "0.05", "--delta", "0.01", "--edges", "15") == 0
    assert capsys.readouterr().out.strip() == "1602"
    assert run(tmp_path, "studies", "kn-separation", "--n-max", "20", "--points", "20000") == 0
    kn = rows(tmp_path / "kn_separation.csv")
    assert len(kn) == 18 and all(float(r["separation"]) > 0 for r in kn if int(r["n"]) >= 4)
    assert run(tmp_path, "studies", "variance", "--sizes", "2,3,4", "--layers", "100", "--instances", "1",
               "--points", "12") == 0
    var = rows(tmp_path / "variance.csv")
    assert [int(r["size"]) for r in var] == [2, 3, 4]
    assert "manifest" in load(tmp_path / "variance.json")
    assert run(tmp_path, "studies", "fit-universality", "--runs", "2") == 0
    assert load(tmp_path / "fit_universality.json")["summary"]["passed"] == 2
    assert read_manifest(tmp_path / "fit_universality.csv")["command"] == "studies fit-universality"


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "faircut", "--version"], capture_output=True, text=True)
    assert res.returncode == 0 and "faircut" in res.stdout
