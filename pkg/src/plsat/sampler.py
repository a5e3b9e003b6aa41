"""Random k-SAT sampling over a non-uniform variable distribution, and DIMACS I/O.

Each clause draws ``k`` variables i.i.d. from ``p``; if any two coincide
the whole k-tuple is thrown away and redrawn, then every variable is
negated with probability 1/2.  The accepted tuple therefore has law
``prod p / (k! * e_k(p))`` over ordered tuples, which gives each
(unordered, signed) clause the probability ``prod p / (2**k * e_k(p))``
computed by :func:`clause_probability`.

Random words come from the counter-based streams in :mod:`plsat.rng`,
keyed by ``(seed, clause index)``; output is identical for any number
of workers and for either kernel backend.
"""
from __future__ import annotations

import json
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from . import __version__, kernels
from .cnf import Formula, FormulaError, canonical_clause
from .weights import VariableDistribution

MAX_EXACT_K = 12
MAX_COLLISION_BOUND = 0.99


class SamplingError(ValueError):
    pass


@dataclass(frozen=True)
class SampleStats:
    attempts: int
    rejections: int

    @property
    def rejection_rate(self) -> float:
        return self.rejections / self.attempts if self.attempts else 0.0


class ClauseSampler:
    """Alias table over ``vd.p``, built once and reused for any number of clauses."""

    def __init__(self, vd: VariableDistribution, backend=None):
        self.vd = vd
        self.backend = backend or kernels.backend
        self.prob, self.alias = self.backend.build_alias(vd.p)

    def collision_bound(self, k: int) -> float:
        return 0.5 * k * k * self.vd.l2sq

    def sample(self, m: int, k: int, seed: int, start: int = 0, workers: int = 1):
        """Return ``(lits, attempts)`` for clauses ``start .. start + m - 1``."""
        if k < 1:
            raise SamplingError("clause width must be at least 1")
        if k > self.vd.n:
            raise SamplingError(f"cannot draw {k} distinct variables out of {self.vd.n}")
        bound = self.collision_bound(k)
        if bound >= MAX_COLLISION_BOUND:
            raise SamplingError(
                f"collision bound k^2*|p|^2/2 = {bound:.4f} >= {MAX_COLLISION_BOUND}; "
                "rejection sampling would not terminate quickly"
            )
        seed = int(seed) & ((1 << 64) - 1)
        if workers <= 1 or m < 2 * workers:
            return self.backend.sample_clauses(self.prob, self.alias, m, k, seed, start)
        edges = np.linspace(0, m, workers + 1).astype(int)
        with ThreadPoolExecutor(workers) as pool:
            parts = list(pool.map(
                lambda ab: self.backend.sample_clauses(
                    self.prob, self.alias, ab[1] - ab[0], k, seed, start + ab[0]),
                zip(edges[:-1], edges[1:]),
            ))
        lits = np.concatenate([p[0] for p in parts]).reshape(m, k)
        return lits, sum(p[1] for p in parts)


def sample_formula(vd: VariableDistribution, m: int, k: int, seed: int, *,
                   workers: int = 1, model: dict | None = None,
                   sampler: ClauseSampler | None = None) -> tuple[Formula, SampleStats]:
    """Draw ``m`` clauses of width ``k``; deterministic in ``(vd, m, k, seed)``."""
    if m < 0:
        raise SamplingError("m must be non-negative")
    sampler = sampler or ClauseSampler(vd)
    lits, attempts = sampler.sample(m, k, seed, workers=workers)
    provenance = {"model": dict(model or {}), "seed": int(seed), "k": k, "version": __version__}
    f = Formula(vd.n, k, lits, provenance)
    return f, SampleStats(attempts, attempts - m)


def elementary_symmetric(p, k: int) -> np.ndarray:
    """``e_0 .. e_k`` of the vector ``p`` by the one-pass DP."""
    e = np.zeros(k + 1)
    e[0] = 1.0
    for x in np.asarray(p, dtype=np.float64):
        e[1:] += x * e[:-1].copy()
    return e


def clause_probability(vd: VariableDistribution, clause, e_k: float | None = None) -> float:
    """Exact probability that one sampled clause equals ``clause`` (canonical form)."""
    clause = tuple(int(x) for x in clause)
    if canonical_clause(clause) != clause:
        raise FormulaError(f"clause {clause} is not in canonical (sorted) form")
    k = len(clause)
    if k > MAX_EXACT_K:
        raise ValueError(f"exact denominator only for k <= {MAX_EXACT_K}")
    if max(abs(x) for x in clause) > vd.n:
        raise FormulaError("clause variable outside 1..n")
    if e_k is None:
        e_k = elementary_symmetric(vd.p, k)[k]
    num = math.prod(float(vd.p[abs(x) - 1]) for x in clause)
    return num / (2.0 ** k * e_k)


def empirical_clause_frequency(vd: VariableDistribution, clause, trials: int, seed: int) -> float:
    """Fraction of ``trials`` independently sampled clauses equal to ``clause``."""
    if trials < 1:
        raise ValueError("trials must be >= 1")
    target = np.array(canonical_clause(clause), dtype=np.int32)
    f, _ = sample_formula(vd, trials, len(target), seed)
    return float(np.mean(np.all(f.clauses == target, axis=1)))


# -- DIMACS -----------------------------------------------------------------

def write_dimacs(f: Formula, sink) -> None:
    if f.provenance:
        sink.write("c plsat " + json.dumps(f.provenance, sort_keys=True) + "\n")
    sink.write(f"p cnf {f.n} {f.m}\n")
    for row in f.clauses:
        sink.write(" ".join(str(int(x)) for x in row) + " 0\n")


def dimacs_string(f: Formula) -> str:
    import io

    buf = io.StringIO()
    write_dimacs(f, buf)
    return buf.getvalue()


def read_dimacs(source, strict_k: int | None = None) -> Formula:
    """Parse DIMACS CNF into a canonical :class:`Formula`.

    Clauses may span lines; ``c plsat {json}`` comments restore provenance.
    Clause widths must agree (with ``strict_k`` when given).
    """
    if isinstance(source, str):
        import io

        source = io.StringIO(source)
    provenance = {}
    header = None
    clauses = []
    current = []
    for lineno, line in enumerate(source, 1):
        s = line.strip()
        if not s:
            continue
        if s.startswith("c"):
            if s.startswith("c plsat "):
                provenance = json.loads(s[len("c plsat "):])
            continue
        if s.startswith("%"):
            break
        if s.startswith("p"):
            parts = s.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf":
                raise FormulaError(f"line {lineno}: bad header {s!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise FormulaError("missing 'p cnf <n> <m>' header")
        for tok in s.split():
            x = int(tok)
            if x == 0:
                clauses.append(current)
                current = []
                continue
            if abs(x) > header[0]:
                raise FormulaError(f"line {lineno}: literal {x} exceeds n = {header[0]}")
            current.append(x)
    if header is None:
        raise FormulaError("missing 'p cnf <n> <m>' header")
    if current:
        clauses.append(current)
    n, m = header
    if len(clauses) != m:
        raise FormulaError(f"header declares {m} clauses, found {len(clauses)}")
    rows = []
    for i, c in enumerate(clauses):
        try:
            rows.append(canonical_clause(c))
        except FormulaError as exc:
            raise FormulaError(f"clause {i + 1}: {exc}") from None
        if strict_k is not None and len(c) != strict_k:
            raise FormulaError(f"clause {i + 1} has width {len(c)}, expected {strict_k}")
    if rows:
        return Formula.from_clauses(n, rows, provenance=provenance)
    k = strict_k if strict_k is not None else int(provenance.get("k", 0))
    return Formula(n, k, np.zeros((0, k), dtype=np.int32), provenance)
