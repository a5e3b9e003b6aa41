"""Clause shrinking and linear-time 2-SAT.

Shrinking replaces every clause by its two lightest literals.  Any model
of the shrunk 2-CNF is a model of the original formula (each original
clause contains its shrunk clause), so a SAT answer certifies the
original; an UNSAT answer says nothing about it.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from . import kernels
from .cnf import Formula, FormulaError, Status, satisfies
from .sampler import ClauseSampler
from .weights import VariableDistribution, WeightSequence


class Reason(enum.Enum):
    TWO_SAT_SCC = "TwoSatSCC"
    TRIVIAL_CORE = "TrivialCore"
    EXHAUSTIVE = "Exhaustive"
    EXTERNAL_SOLVER = "ExternalSolver"
    SHRUNK_UNSAT = "ShrunkUnsat"


@dataclass(frozen=True)
class Certificate:
    status: Status
    reason: Reason
    assignment: np.ndarray | None = None

    def __post_init__(self):
        if self.status is Status.SAT and self.assignment is None:
            raise ValueError("a SAT certificate needs an assignment")
        if self.reason is Reason.SHRUNK_UNSAT and self.status is not Status.UNKNOWN:
            raise ValueError("an unsatisfiable shrunk formula only yields UNKNOWN")


def lit_node(lit: int) -> int:
    """Node of literal ``lit`` in the implication graph: ``2(v-1)`` for x_v, ``2(v-1)+1`` for not x_v."""
    return 2 * (abs(lit) - 1) + (1 if lit < 0 else 0)


class ImplicationGraph:
    """CSR digraph on ``2n`` literal nodes; clause (a or b) adds not a -> b and not b -> a."""

    def __init__(self, f: Formula):
        if f.k != 2:
            raise FormulaError(f"implication graph needs k = 2, got k = {f.k}")
        self.n = f.n
        c = f.clauses.astype(np.int64)
        a = 2 * (np.abs(c[:, 0]) - 1) + (c[:, 0] < 0)
        b = 2 * (np.abs(c[:, 1]) - 1) + (c[:, 1] < 0)
        src = np.concatenate([a ^ 1, b ^ 1])
        dst = np.concatenate([b, a])
        order = np.argsort(src, kind="stable")
        self.src = src[order]
        self.dst = dst[order]
        self.indptr = np.zeros(2 * self.n + 1, dtype=np.int64)
        np.add.at(self.indptr, self.src + 1, 1)
        self.indptr = np.cumsum(self.indptr)
        self.indices = self.dst

    @property
    def num_nodes(self) -> int:
        return 2 * self.n

    def edges(self) -> set[tuple[int, int]]:
        return set(zip(self.src.tolist(), self.dst.tolist()))

    def is_contrapositive_closed(self) -> bool:
        e = self.edges()
        return all((v ^ 1, u ^ 1) in e for u, v in e)


def shrink(f: Formula, ws: WeightSequence) -> Formula:
    """Keep the two lowest-weight literals of every clause; ties go to the lower index."""
    if f.k < 2:
        raise FormulaError(f"shrinking needs k >= 2, got k = {f.k}")
    if ws.n < f.n:
        raise FormulaError(f"weights cover {ws.n} variables, formula has {f.n}")
    if f.k == 2:
        return f
    var = np.abs(f.clauses)
    # lexsort: primary key weight, secondary key variable index
    order = np.lexsort((var, ws.weights[var - 1]), axis=1)[:, :2]
    pair = np.take_along_axis(f.clauses, order, axis=1)
    pair = np.where(np.abs(pair[:, :1]) < np.abs(pair[:, 1:]), pair, pair[:, ::-1])
    return Formula(f.n, 2, pair, dict(f.provenance, shrunk_from_k=f.k))


def solve_2sat(f: Formula) -> Certificate:
    """SCC decision procedure; SAT certificates carry a verified model."""
    g = ImplicationGraph(f)
    if f.n == 0:
        return Certificate(Status.SAT, Reason.TWO_SAT_SCC, np.zeros(0, dtype=bool))
    comp = kernels.scc(g.num_nodes, g.indptr, g.indices)
    pos, neg = comp[0::2], comp[1::2]
    if np.any(pos == neg):
        return Certificate(Status.UNSAT, Reason.TWO_SAT_SCC)
    # components come out in reverse topological order: a literal whose
    # component is issued first cannot imply its own negation
    assignment = pos < neg
    if not satisfies(f, assignment):
        raise AssertionError("2-SAT model failed verification")
    return Certificate(Status.SAT, Reason.TWO_SAT_SCC, assignment)


def certify_by_shrinking(f: Formula, ws: WeightSequence) -> Certificate:
    """Shrink, solve the 2-CNF, and lift a model back to ``f``.

    Variables that do not occur in the shrunk formula are set to false.
    """
    g = shrink(f, ws)
    cert = solve_2sat(g)
    if cert.status is Status.UNSAT:
        return Certificate(Status.UNKNOWN, Reason.SHRUNK_UNSAT)
    assignment = np.zeros(f.n, dtype=bool)
    used = np.unique(np.abs(g.clauses)) - 1
    assignment[used] = cert.assignment[used]
    if not satisfies(g, assignment) or not satisfies(f, assignment):
        raise AssertionError("shrinking certificate failed verification on the original formula")
    return Certificate(Status.SAT, Reason.TWO_SAT_SCC, assignment)


# -- law of the shrunk pair -------------------------------------------------

EXACT_PAIR_MAX_N = 200
EXACT_PAIR_MAX_K = 4


def exact_shrunk_pair_law(vd: VariableDistribution, ws: WeightSequence, k: int) -> np.ndarray:
    """``q[i, j]`` (0-based, ``i < j`` by weight rank) = Pr[shrunk pair = {i, j}].

    A sampled clause is a k-set ``S`` with probability ``prod_S p / e_k(p)``.
    The pair is ``{i, j}`` exactly when the other ``k-2`` members of ``S``
    all rank above ``j``, so ``q[i, j] = p_i p_j e_{k-2}(p over ranks > j) / e_k(p)``.
    """
    n = vd.n
    if n > EXACT_PAIR_MAX_N or k > EXACT_PAIR_MAX_K or k < 2:
        raise ValueError(f"exact pair law needs 2 <= k <= {EXACT_PAIR_MAX_K}, n <= {EXACT_PAIR_MAX_N}")
    rank = np.lexsort((np.arange(n), ws.weights[:n]))
    p = vd.p[rank]
    # suffix[j, t] = e_t(p[j:])
    suffix = np.zeros((n + 1, k + 1))
    suffix[n, 0] = 1.0
    for j in range(n - 1, -1, -1):
        suffix[j] = suffix[j + 1]
        suffix[j, 1:] += p[j] * suffix[j + 1, :-1]
    total = suffix[0, k]
    q = np.zeros((n, n))
    for j in range(1, n):
        q[:j, j] = p[:j] * p[j] * suffix[j + 1, k - 2] / total
    out = np.zeros((n, n))
    out[np.ix_(rank, rank)] = q
    return out


@dataclass(frozen=True)
class PairLawReport:
    trials: int
    max_sigma: float
    worst_pair: tuple[int, int]
    impossible_hits: int
    empirical: np.ndarray
    exact: np.ndarray


def shrunk_pair_distribution_check(vd: VariableDistribution, ws: WeightSequence, k: int,
                                   trials: int, seed: int) -> PairLawReport:
    """Sample, shrink and tabulate pairs; compare with :func:`exact_shrunk_pair_law`."""
    exact = exact_shrunk_pair_law(vd, ws, k)
    lits, _ = ClauseSampler(vd).sample(trials, k, seed)
    f = Formula(vd.n, k, lits)
    g = shrink(f, ws)
    a = np.abs(g.clauses[:, 0]).astype(np.int64) - 1
    b = np.abs(g.clauses[:, 1]).astype(np.int64) - 1
    lo, hi = np.minimum(a, b), np.maximum(a, b)
    counts = np.zeros((vd.n, vd.n))
    np.add.at(counts, (lo, hi), 1)
    emp = counts / trials
    sym = exact + exact.T
    qe = np.triu(sym, 1)
    mask = qe > 0
    sigma = np.sqrt(qe[mask] * (1 - qe[mask]) / trials)
    z = np.abs(emp[mask] - qe[mask]) / sigma
    worst = np.argwhere(mask)[int(np.argmax(z))]
    return PairLawReport(
        trials=trials,
        max_sigma=float(z.max()),
        worst_pair=(int(worst[0]) + 1, int(worst[1]) + 1),
        impossible_hits=int(counts[~mask].sum()),
        empirical=emp,
        exact=qe,
    )
