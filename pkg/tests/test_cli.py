import subprocess
import sys

import pytest

from plsat.cli import main
from plsat.cnf import satisfies
from plsat.sampler import read_dimacs
from plsat.weights import read_weights

from conftest import shim_cmd


@pytest.fixture
def instance(tmp_path):
    cnf, plw = tmp_path / "f.cnf", tmp_path / "f.plw"
    assert main(["gen", "--n", "300", "--ratio", "0.3", "--k", "3", "--beta", "2.8", "--seed", "3",
                 "--out", str(cnf), "--weights-out", str(plw)]) == 0
    return cnf, plw


def test_gen_writes_formula_and_weights(instance):
    cnf, plw = instance
    f = read_dimacs(cnf.read_text())
    assert (f.n, f.m, f.k) == (300, 90, 3)
    assert f.provenance["model"]["beta"] == 2.8
    assert read_weights(open(plw)).n == 300


def test_gen_requires_one_density(tmp_path):
    with pytest.raises(SystemExit):
        main(["gen", "--n", "10", "--beta", "2.5"])
    with pytest.raises(SystemExit):
        main(["gen", "--n", "10", "--m", "5", "--ratio", "1"])


def test_gen_from_weights_file(instance, tmp_path):
    _, plw = instance
    out = tmp_path / "g.cnf"
    main(["gen", "--n", "300", "--m", "50", "--weights-in", str(plw), "--out", str(out)])
    assert read_dimacs(out.read_text()).m == 50


def test_certify_and_assignment(instance, tmp_path, capsys):
    cnf, plw = instance
    asg = tmp_path / "a.txt"
    assert main(["certify", "--in", str(cnf), "--weights-in", str(plw), "--emit-assignment", str(asg)]) == 0
    assert capsys.readouterr().out.startswith("s SAT (TwoSatSCC)")
    lines = asg.read_text().splitlines()
    assert len(lines) == 300 and lines[0].split()[0] == "v1"
    values = [line.split()[1] == "1" for line in lines]
    assert satisfies(read_dimacs(cnf.read_text()), values)


def test_solve_internal_and_external(instance, capsys, monkeypatch):
    cnf, _ = instance
    assert main(["solve", "--in", str(cnf), "--branching", "index"]) == 10
    out = capsys.readouterr().out
    assert "s SATISFIABLE" in out and out.rstrip().endswith(" 0")
    monkeypatch.setenv("PLSAT_SOLVER", shim_cmd("bad_solvers.py", "crash"))
    assert main(["solve", "--in", str(cnf), "--external"]) == 0
    assert "s UNKNOWN" in capsys.readouterr().out


def test_bound_commands(capsys, tmp_path):
    assert main(["bound", "--k", "3", "--beta", "2.7"]) == 0
    assert "r* = 3.86" in capsys.readouterr().out
    assert main(["bound", "--k", "3", "--beta", "2.3"]) == 1
    assert "never satisfied" in capsys.readouterr().out
    assert main(["bound", "--k", "3", "--uniform"]) == 0
    assert "r* = 4.66" in capsys.readouterr().out
    with pytest.raises(SystemExit):
        main(["bound", "--k", "3", "--beta", "2.7", "--buckets", "100", "--integral"])


def test_witness(tmp_path, capsys):
    rows = [f"{a} {b} {c} 0" for a in (1, -1) for b in (2, -2) for c in (3, -3)]
    cnf = tmp_path / "core.cnf"
    cnf.write_text("p cnf 4 9\n1 2 4 0\n" + "\n".join(rows) + "\n")
    assert main(["witness", "--in", str(cnf)]) == 0
    out = capsys.readouterr().out
    assert "variables 1 2 3" in out
    ids = out.splitlines()[1].split()[1:]
    assert sorted(map(int, ids)) == list(range(2, 10))


def test_degrees(instance, tmp_path, capsys):
    cnf, _ = instance
    csv = tmp_path / "deg.csv"
    main(["degrees", "--in", str(cnf), "--beta", "2.8", "--dmin", "1", "--dmax", "10", "--csv", str(csv)])
    assert capsys.readouterr().out.startswith("slope = ")
    assert csv.read_text().startswith("d,n_at_least\n1,")


def test_sweep_command(tmp_path):
    out = tmp_path / "sw"
    main(["sweep", "--set", "n=100", "--set", "betas=2.5,2.9", "--set", "ratios=1,4",
          "--set", "instances=2", "--out", str(out)])
    assert (out / "cells.csv").read_text().count("\n") == 5


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "plsat", "--version"], capture_output=True, text=True)
    assert proc.returncode == 0 and proc.stdout.startswith("plsat ")
