import os

import numpy as np
import pytest

from plsat.cnf import Formula, Status, brute_force_status, satisfies
from plsat.sampler import sample_formula
from plsat.solvers import (SOLVER_ENV, SolverContractError, branching_order, parse_solver_output,
                           solve_complete, solve_external)
from plsat.weights import build_concrete, distribution

from conftest import random_formula, shim_cmd

try:
    import pysat  # noqa: F401
    HAVE_PYSAT = True
except ImportError:
    HAVE_PYSAT = False
needs_pysat = pytest.mark.skipif(not HAVE_PYSAT, reason="python-sat not installed")

def pigeonhole():
    rows = [(1, 2), (3, 4), (5, 6), (-1, -3), (-1, -5), (-3, -5), (-2, -4), (-2, -6), (-4, -6)]
    return Formula.from_clauses(6, rows)


def test_branching_order():
    ws = build_concrete(5, 3.0)
    assert branching_order(5, ws).tolist() == [5, 4, 3, 2, 1]
    assert branching_order(5, heuristic="index").tolist() == [1, 2, 3, 4, 5]
    with pytest.raises(ValueError):
        branching_order(5, heuristic="random")


@pytest.mark.parametrize("heuristic", ["weight", "index"])
@pytest.mark.parametrize("phase", [False, True])
def test_dpll_against_brute_force(rng, backend, heuristic, phase):
    for _ in range(400):
        n = int(rng.integers(3, 9))
        k = int(rng.integers(2, 4))
        f = random_formula(rng, n, int(rng.integers(1, 6 * n)), k)
        out = solve_complete(f, ws=build_concrete(n, 2.5), heuristic=heuristic, phase=phase, backend=backend)
        assert out.status is brute_force_status(f)
        if out.status is Status.SAT:
            assert satisfies(f, out.assignment)


def test_dpll_budget_gives_timeout():
    out = solve_complete(pigeonhole(), budget=0)
    assert out.status is Status.TIMEOUT
    out = solve_complete(pigeonhole())
    assert out.status is Status.UNSAT and out.stats.decisions > 0


def test_dpll_empty_formula():
    f = Formula(3, 3, np.zeros((0, 3), dtype=np.int32))
    assert solve_complete(f).status is Status.SAT


def test_parse_competition_output():
    st, model = parse_solver_output("c hi\ns SATISFIABLE\nv 1 -2\nv 3 0\n")
    assert st is Status.SAT and model == [1, -2, 3, 0]
    assert parse_solver_output("s UNSATISFIABLE\n") == (Status.UNSAT, None)


def test_parse_minisat_result_file():
    assert parse_solver_output("SAT\n1 -2 3 0\n") == (Status.SAT, [1, -2, 3, 0])
    assert parse_solver_output("UNSAT\n")[0] is Status.UNSAT
    assert parse_solver_output("INDETERMINATE\n")[0] is None


def test_external_brute_shim_with_out_placeholder():
    cmd = shim_cmd("brute_solver.py", "{in}", "{out}")
    f = Formula.from_clauses(3, [(1, 2), (-1, 3), (-2, -3)])
    out = solve_external(f, cmd)
    assert out.status is Status.SAT and satisfies(f, out.assignment)
    assert solve_external(pigeonhole(), cmd).status is Status.UNSAT


def test_external_from_environment(monkeypatch):
    monkeypatch.setenv(SOLVER_ENV, shim_cmd("brute_solver.py", "{in}", "{out}"))
    assert solve_external(pigeonhole()).status is Status.UNSAT
    monkeypatch.delenv(SOLVER_ENV)
    with pytest.raises(ValueError):
        solve_external(pigeonhole())


def test_external_contract_violations():
    f = Formula.from_clauses(3, [(1, 2, 3)])
    with pytest.raises(SolverContractError):
        solve_external(f, shim_cmd("bad_solvers.py", "wrong-model"))
    with pytest.raises(SolverContractError):
        solve_external(f, shim_cmd("bad_solvers.py", "no-model"))


def test_external_unknown_and_timeout():
    f = Formula.from_clauses(3, [(1, 2, 3)])
    out = solve_external(f, shim_cmd("bad_solvers.py", "crash"))
    assert out.status is Status.UNKNOWN
    assert out.detail.startswith("unknown-external: exit 3")
    assert "segfault" in out.detail
    out = solve_external(f, shim_cmd("bad_solvers.py", "sleep"), budget_ms=300)
    assert out.status is Status.TIMEOUT


@pytest.mark.slow
@needs_pysat
def test_external_pysat_agrees_with_dpll():
    cmd = shim_cmd("pysat_solver.py")
    vd = distribution(build_concrete(50, 2.6))
    disagreements = 0
    for i in range(500):
        r = 3 if i % 2 else 5
        f, _ = sample_formula(vd, 50 * r, 3, 1000 + i)
        a = solve_complete(f).status
        b = solve_external(f, cmd).status
        disagreements += a is not b
    assert disagreements == 0


@needs_pysat
def test_external_pysat_result_file():
    cmd = shim_cmd("pysat_solver.py", "{in}", "{out}")
    f = Formula.from_clauses(4, [(1, -2), (2, 3), (-3, 4)])
    out = solve_external(f, cmd)
    assert out.status is Status.SAT and satisfies(f, out.assignment)
