import io
import itertools
import math

import numpy as np
import pytest

from plsat.cnf import Formula, FormulaError
from plsat.sampler import (ClauseSampler, SamplingError, clause_probability, dimacs_string,
                           elementary_symmetric, empirical_clause_frequency, read_dimacs,
                           sample_formula, write_dimacs)
from plsat.weights import build_concrete, distribution, uniform

from conftest import all_sign_patterns


def canonical_clauses(n, k):
    for vs in itertools.combinations(range(1, n + 1), k):
        yield from all_sign_patterns(vs)


def test_elementary_symmetric_matches_enumeration(rng):
    p = rng.random(9)
    e = elementary_symmetric(p, 4)
    for t in range(5):
        ref = sum(math.prod(c) for c in itertools.combinations(p, t))
        assert e[t] == pytest.approx(ref, rel=1e-13)


def test_clause_probability_frozen_values():
    assert clause_probability(distribution(uniform(3)), (1, -2)) == pytest.approx(1 / 12)
    assert clause_probability(distribution(uniform(2)), (-1, -2)) == pytest.approx(1 / 4)
    assert clause_probability(distribution(build_concrete(2, 3.0)), (1, 2)) == pytest.approx(1 / 4)
    vd = distribution(build_concrete(4, 3.0))
    e2 = sum(a * b for a, b in itertools.combinations(vd.p, 2))
    p34 = 0.09120191456701466989419860882808036127005  # mpmath
    assert clause_probability(vd, (3, -4)) == pytest.approx(p34 / (4 * e2), rel=1e-13)


@pytest.mark.parametrize("n,k", [(4, 2), (5, 3), (6, 4)])
def test_clause_law_sums_to_one(n, k):
    vd = distribution(build_concrete(n, 2.4))
    total = sum(clause_probability(vd, c) for c in canonical_clauses(n, k))
    assert total == pytest.approx(1.0, abs=1e-12)


def test_clause_probability_rejects_non_canonical():
    vd = distribution(uniform(4))
    with pytest.raises(FormulaError):
        clause_probability(vd, (2, 1))
    with pytest.raises(FormulaError):
        clause_probability(vd, (1, 5))


def test_sampling_is_deterministic_and_canonical(backend):
    vd = distribution(build_concrete(200, 2.5))
    s = ClauseSampler(vd, backend)
    a, _ = s.sample(1000, 3, 42)
    b, _ = s.sample(1000, 3, 42)
    c, _ = s.sample(1000, 3, 43)
    assert np.array_equal(a, b) and not np.array_equal(a, c)
    Formula(200, 3, a)  # validates canonical form


def test_workers_do_not_change_output():
    vd = distribution(build_concrete(500, 2.3))
    s = ClauseSampler(vd)
    one, att1 = s.sample(5000, 4, 9)
    many, att4 = s.sample(5000, 4, 9, workers=4)
    assert np.array_equal(np.asarray(one).reshape(-1, 4), many) and att1 == att4


def test_sample_formula_provenance_and_stats():
    vd = distribution(build_concrete(100, 2.5))
    f, st = sample_formula(vd, 300, 3, 7, model={"beta": 2.5})
    assert f.m == 300 and f.k == 3 and f.n == 100
    assert f.provenance["seed"] == 7 and f.provenance["model"] == {"beta": 2.5}
    assert st.attempts == 300 + st.rejections
    assert 0 <= st.rejection_rate < 1


def test_sign_balance():
    vd = distribution(build_concrete(1000, 2.5))
    f, _ = sample_formula(vd, 20000, 3, 3)
    neg = float((f.clauses < 0).mean())
    assert abs(neg - 0.5) < 0.01


def test_sampler_errors():
    vd = distribution(uniform(3))
    with pytest.raises(SamplingError):
        ClauseSampler(vd).sample(1, 4, 0)
    heavy = distribution(build_concrete(5, 2.05))
    with pytest.raises(SamplingError):
        ClauseSampler(heavy).sample(1, 5, 0)
    with pytest.raises(SamplingError):
        sample_formula(vd, -1, 2, 0)


def test_empirical_frequency_close_to_law():
    vd = distribution(build_concrete(4, 3.0))
    q = clause_probability(vd, (3, -4))
    t = 200_000
    emp = empirical_clause_frequency(vd, (3, -4), t, 1)
    assert abs(emp - q) < 5 * math.sqrt(q * (1 - q) / t)


def test_dimacs_round_trip():
    vd = distribution(build_concrete(40, 2.5))
    f, _ = sample_formula(vd, 60, 3, 5, model={"weights": "concrete"})
    g = read_dimacs(dimacs_string(f))
    assert g == f
    buf = io.StringIO()
    write_dimacs(Formula.from_clauses(3, [(1, -2)]), buf)
    assert buf.getvalue() == "p cnf 3 1\n1 -2 0\n"


def test_dimacs_reader_canonicalises_and_spans_lines():
    f = read_dimacs("c hello\np cnf 4 2\n3 -1\n0 4 2 0\n")
    assert f.clause_list() == [(-1, 3), (2, 4)]


def test_dimacs_empty_formula_keeps_width():
    f = Formula(5, 3, np.zeros((0, 3), dtype=np.int32), {"k": 3})
    assert read_dimacs(dimacs_string(f)).k == 3
    assert read_dimacs("p cnf 2 0\n", strict_k=2).k == 2


@pytest.mark.parametrize("text", [
    "1 2 0\n",                       # no header
    "p cnf 2 1\n1 3 0\n",            # literal out of range
    "p cnf 3 1\n1 -1 0\n",           # repeated variable
    "p cnf 3 2\n1 2 0\n",            # clause count mismatch
    "p cnf 3 2\n1 2 0\n1 2 3 0\n",   # mixed widths
])
def test_dimacs_reader_errors(text):
    with pytest.raises(FormulaError):
        read_dimacs(text)


def test_dimacs_strict_width():
    with pytest.raises(FormulaError):
        read_dimacs("p cnf 3 1\n1 2 0\n", strict_k=3)
