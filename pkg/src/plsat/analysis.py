"""Structural analyses of sampled formulas: trivial cores and occurrence-degree tails."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .cnf import Formula
from .weights import WeightSequence


@dataclass(frozen=True)
class TrivialCoreWitness:
    """``2**k`` clauses on one variable set covering every sign pattern."""

    varset: tuple[int, ...]
    clause_ids: tuple[int, ...]  # 0-based clause indices, one per sign pattern

    def verify(self, f: Formula) -> bool:
        k = len(self.varset)
        if len(self.clause_ids) != 1 << k:
            return False
        patterns = set()
        for ci in self.clause_ids:
            row = [int(x) for x in f.clauses[ci]]
            if tuple(abs(x) for x in row) != self.varset:
                return False
            patterns.add(tuple(x < 0 for x in row))
        return len(patterns) == 1 << k


def find_trivial_core(f: Formula) -> TrivialCoreWitness | None:
    """First variable set (by earliest clause) whose clauses show all ``2**k`` sign patterns."""
    k, m = f.k, f.m
    if k == 0 or m < (1 << k) or k > 30:
        return None
    var = np.abs(f.clauses)
    pattern = ((f.clauses < 0).astype(np.int64) << np.arange(k, dtype=np.int64)).sum(axis=1)
    _, group = np.unique(var, axis=0, return_inverse=True)
    group = group.ravel()
    key = group.astype(np.int64) * (1 << k) + pattern
    ukey, first = np.unique(key, return_index=True)
    ugroup, npat = np.unique(ukey >> k, return_counts=True)
    complete = ugroup[npat == 1 << k]
    if complete.size == 0:
        return None
    # pick the complete group containing the earliest clause
    earliest = {g: m for g in complete.tolist()}
    for g, idx in zip((ukey >> k).tolist(), first.tolist()):
        if g in earliest and idx < earliest[g]:
            earliest[g] = idx
    g = min(earliest, key=earliest.get)
    sel = (ukey >> k) == g
    ids = first[sel][np.argsort(ukey[sel] & ((1 << k) - 1))]
    varset = tuple(int(x) for x in var[ids[0]])
    return TrivialCoreWitness(varset, tuple(int(i) for i in ids))


def occurrences(f: Formula) -> np.ndarray:
    """Occurrences (positive plus negative) of each variable 1..n."""
    return np.bincount(np.abs(f.clauses).ravel(), minlength=f.n + 1)[1:]


@dataclass(frozen=True)
class DegreeReport:
    d: np.ndarray  # 1 .. max degree
    n_at_least: np.ndarray  # N_{>=d}
    slope: float
    intercept: float
    d_min: float
    d_max: float

    def rows(self):
        return zip(self.d.tolist(), self.n_at_least.tolist())


def degree_report(f: Formula, d_min: float = 5, d_max: float | None = None,
                  beta: float | None = None) -> DegreeReport:
    """Tail counts ``N_{>=d}`` and their log-log least-squares slope on ``[d_min, d_max]``.

    ``d_max`` defaults to ``n**(1/(beta-1)) / 4`` when ``beta`` is known.
    """
    if d_max is None:
        if beta is None:
            raise ValueError("give d_max or beta")
        d_max = f.n ** (1.0 / (beta - 1.0)) / 4
    if not 1 <= d_min < d_max:
        raise ValueError(f"need 1 <= d_min < d_max, got [{d_min}, {d_max}]")
    occ = occurrences(f)
    top = int(occ.max()) if occ.size else 0
    hist = np.bincount(occ, minlength=top + 1)
    # N_{>=d} for d = 1..top
    tail = np.cumsum(hist[::-1])[::-1][1:]
    d = np.arange(1, top + 1)
    sel = (d >= d_min) & (d <= d_max) & (tail > 0)
    if sel.sum() < 2:
        raise ValueError(f"fewer than two non-empty degrees in [{d_min}, {d_max}]")
    slope, intercept = np.polyfit(np.log(d[sel]), np.log(tail[sel]), 1)
    return DegreeReport(d, tail, float(slope), float(intercept), float(d_min), float(d_max))


def top_k_cooccurrence(f: Formula, ws: WeightSequence) -> int:
    """Clauses whose variable set is exactly the ``k`` heaviest variables."""
    k = f.k
    if k == 0 or f.m == 0:
        return 0
    rank = np.lexsort((np.arange(ws.n), ws.weights))
    heavy = np.sort(rank[-k:] + 1)
    return int(np.all(np.abs(f.clauses) == heavy, axis=1).sum())
