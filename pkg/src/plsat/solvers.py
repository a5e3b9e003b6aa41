"""Complete satisfiability checks: the built-in DPLL and an external-solver adapter.

The internal solver budgets by decisions (reproducible); the external
adapter budgets by wall clock.  Every SAT answer is checked against the
formula before it is returned.
"""
from __future__ import annotations

import os
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import kernels
from .cnf import Formula, Status, satisfies
from .sampler import write_dimacs
from .weights import WeightSequence

SOLVER_ENV = "PLSAT_SOLVER"


class SolverContractError(RuntimeError):
    """An external solver answered SAT without a model that checks out."""


@dataclass
class SolveStats:
    decisions: int = 0
    propagations: int = 0
    wall_ms: float = 0.0


@dataclass
class SolveOutcome:
    status: Status
    assignment: np.ndarray | None = None
    stats: SolveStats = field(default_factory=SolveStats)
    detail: str = ""


def branching_order(n: int, ws: WeightSequence | None = None, heuristic: str = "weight") -> np.ndarray:
    """1-based variables in branching priority.

    ``"weight"`` puts the heaviest variable first (ties: higher index first);
    without weights the index stands in for weight, matching the sorted
    weight convention.  ``"index"`` is plain ascending order.
    """
    idx = np.arange(1, n + 1)
    if heuristic == "index":
        return idx
    if heuristic != "weight":
        raise ValueError(f"unknown branching heuristic {heuristic!r}")
    if ws is None:
        return idx[::-1].copy()
    return idx[np.lexsort((-idx, -ws.weights[:n]))]


def solve_complete(f: Formula, budget: int | None = None, *, ws: WeightSequence | None = None,
                   heuristic: str = "weight", phase: bool = False, backend=None) -> SolveOutcome:
    """DPLL with two-watched-literal unit propagation.

    ``budget`` caps the number of decisions; hitting it yields TIMEOUT.
    ``phase`` is the value tried first at each decision.
    """
    backend = backend or kernels.backend
    t0 = time.perf_counter()
    order = branching_order(f.n, ws, heuristic)
    if f.m == 0:
        code, model, dec, prop = 1, np.zeros(f.n, dtype=np.int8), 0, 0
    else:
        code, model, dec, prop = backend.dpll(
            f.n, f.clauses.ravel(), f.k, order, int(phase), -1 if budget is None else int(budget)
        )
    stats = SolveStats(dec, prop, (time.perf_counter() - t0) * 1e3)
    if code == 1:
        assignment = model.astype(bool)
        if not satisfies(f, assignment):
            raise AssertionError("DPLL model failed verification")
        return SolveOutcome(Status.SAT, assignment, stats)
    if code == 0:
        return SolveOutcome(Status.UNSAT, None, stats)
    return SolveOutcome(Status.TIMEOUT, None, stats, detail=f"decision budget {budget} exhausted")


# -- external solvers ---------------------------------------------------------

_STATUS_WORDS = {
    "SATISFIABLE": Status.SAT,
    "SAT": Status.SAT,
    "UNSATISFIABLE": Status.UNSAT,
    "UNSAT": Status.UNSAT,
}


def parse_solver_output(text: str) -> tuple[Status | None, list[int] | None]:
    """Read a status and model from competition-style (``s``/``v`` lines) or MiniSat result text."""
    status = None
    model: list[int] | None = None
    for line in text.splitlines():
        tok = line.split()
        if not tok or tok[0] == "c":
            continue
        if tok[0] == "s" and len(tok) >= 2:
            status = _STATUS_WORDS.get(tok[1], status)
        elif tok[0] == "v":
            model = (model or []) + [int(x) for x in tok[1:]]
        elif tok[0] in _STATUS_WORDS and len(tok) == 1:
            status = _STATUS_WORDS[tok[0]]
        elif status is Status.SAT and all(x.lstrip("-").isdigit() for x in tok):
            model = (model or []) + [int(x) for x in tok]
    return status, model


def _command(template: str, cnf: Path, out: Path) -> list[str]:
    args = shlex.split(template)
    if "{in}" not in template:
        args.append("{in}")
    return [a.replace("{in}", str(cnf)).replace("{out}", str(out)) for a in args]


def solve_external(f: Formula, solver_cmd: str | None = None, budget_ms: float | None = None) -> SolveOutcome:
    """Run a DIMACS solver given as a command template with ``{in}`` and optional ``{out}``.

    The template defaults to ``$PLSAT_SOLVER``.  A missing ``{in}`` means the
    CNF path is appended.
    """
    solver_cmd = solver_cmd or os.environ.get(SOLVER_ENV)
    if not solver_cmd:
        raise ValueError(f"no external solver given and ${SOLVER_ENV} is unset")
    with tempfile.TemporaryDirectory(prefix="plsat-") as tmp:
        cnf = Path(tmp) / "formula.cnf"
        out = Path(tmp) / "result.txt"
        with open(cnf, "w") as fh:
            write_dimacs(f, fh)
        t0 = time.perf_counter()
        try:
            proc = subprocess.run(
                _command(solver_cmd, cnf, out), capture_output=True, text=True,
                timeout=None if budget_ms is None else budget_ms / 1e3,
            )
        except subprocess.TimeoutExpired:
            wall = (time.perf_counter() - t0) * 1e3
            return SolveOutcome(Status.TIMEOUT, None, SolveStats(wall_ms=wall), detail="wall-clock limit")
        wall = (time.perf_counter() - t0) * 1e3
        text = proc.stdout
        if out.exists():
            text += "\n" + out.read_text()
    status, model = parse_solver_output(text)
    stats = SolveStats(wall_ms=wall)
    if status is None:
        excerpt = proc.stderr.strip()[-300:]
        return SolveOutcome(Status.UNKNOWN, None, stats,
                            detail=f"unknown-external: exit {proc.returncode}: {excerpt}")
    if status is Status.UNSAT:
        return SolveOutcome(Status.UNSAT, None, stats)
    if model is None:
        raise SolverContractError("solver reported SAT without a model")
    assignment = np.zeros(f.n, dtype=bool)
    for lit in model:
        if lit > 0:
            if lit > f.n:
                raise SolverContractError(f"model literal {lit} outside 1..{f.n}")
            assignment[lit - 1] = True
    if not satisfies(f, assignment):
        raise SolverContractError("solver model does not satisfy the formula")
    return SolveOutcome(Status.SAT, assignment, stats)
