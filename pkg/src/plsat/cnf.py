"""CNF formulas and satisfiability statuses.

Literals are signed DIMACS integers (``3`` is x3, ``-3`` is its negation).
A clause is stored canonically: exactly ``k`` literals on pairwise distinct
variables, sorted by variable index.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np


class FormulaError(ValueError):
    pass


class Status(enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    UNKNOWN = "UNKNOWN"
    TIMEOUT = "TIMEOUT"


def canonical_clause(lits) -> tuple[int, ...]:
    """Sort a clause by variable index, rejecting zero or repeated variables."""
    lits = [int(x) for x in lits]
    if any(x == 0 for x in lits):
        raise FormulaError("literal 0 is not a variable")
    out = tuple(sorted(lits, key=abs))
    for a, b in zip(out, out[1:]):
        if abs(a) == abs(b):
            raise FormulaError(f"duplicate variable {abs(a)} in clause {out}")
    return out


@dataclass(eq=False)
class Formula:
    """``m`` clauses of width ``k`` over variables ``1..n``.

    ``clauses`` is an ``(m, k)`` int32 array of canonical clauses.
    ``provenance`` records how the formula was produced (model parameters,
    seed, generator version) and travels with it through DIMACS files.
    """

    n: int
    k: int
    clauses: np.ndarray
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        arr = np.asarray(self.clauses, dtype=np.int32)
        if arr.size == 0:
            arr = arr.reshape(0, self.k)
        if arr.ndim != 2 or arr.shape[1] != self.k:
            raise FormulaError(f"clauses must have shape (m, {self.k}), got {arr.shape}")
        if self.n < 0 or self.k < 0:
            raise FormulaError("n and k must be non-negative")
        if arr.size:
            var = np.abs(arr)
            if var.min() < 1 or var.max() > self.n:
                raise FormulaError(f"literal index outside 1..{self.n}")
            if self.k > 1:
                d = np.diff(var, axis=1)
                if np.any(d == 0):
                    raise FormulaError("clause with a repeated variable")
                if np.any(d < 0):
                    raise FormulaError("clauses must be sorted by variable index")
        arr.setflags(write=False)
        self.clauses = arr

    @classmethod
    def from_clauses(cls, n: int, clauses, k: int | None = None, provenance=None) -> "Formula":
        rows = [canonical_clause(c) for c in clauses]
        if k is None:
            widths = {len(r) for r in rows}
            if len(widths) > 1:
                raise FormulaError(f"mixed clause widths {sorted(widths)}")
            k = widths.pop() if widths else 0
        return cls(n, k, np.array(rows, dtype=np.int32).reshape(len(rows), k), dict(provenance or {}))

    @property
    def m(self) -> int:
        return self.clauses.shape[0]

    def __len__(self):
        return self.m

    def __eq__(self, other):
        if not isinstance(other, Formula):
            return NotImplemented
        return (
            self.n == other.n
            and self.k == other.k
            and np.array_equal(self.clauses, other.clauses)
            and self.provenance == other.provenance
        )

    def __repr__(self):
        return f"Formula(n={self.n}, k={self.k}, m={self.m})"

    def clause_list(self) -> list[tuple[int, ...]]:
        return [tuple(int(x) for x in row) for row in self.clauses]


def satisfies(f: Formula, assignment) -> bool:
    """True iff ``assignment`` (bools for variables 1..n, 0-indexed) satisfies every clause."""
    a = np.asarray(assignment, dtype=bool)
    if a.shape != (f.n,):
        raise FormulaError(f"assignment must cover exactly {f.n} variables")
    if f.m == 0:
        return True
    value = a[np.abs(f.clauses) - 1]
    lit_true = np.where(f.clauses > 0, value, ~value)
    return bool(lit_true.any(axis=1).all())


def brute_force_status(f: Formula) -> Status:
    """Exhaustive check over all 2**n assignments (small n only)."""
    if f.n > 20:
        raise ValueError("brute force limited to n <= 20")
    if f.m == 0:
        return Status.SAT
    bits = (np.arange(1 << f.n)[:, None] >> np.arange(f.n)[None, :]) & 1
    value = bits[:, np.abs(f.clauses) - 1].astype(bool)
    lit_true = np.where(f.clauses > 0, value, ~value)
    sat = lit_true.any(axis=2).all(axis=1)
    return Status.SAT if sat.any() else Status.UNSAT
