import itertools

import numpy as np
import pytest

from plsat.cnf import Formula, FormulaError, Status, brute_force_status, satisfies
from plsat.twosat import (Certificate, ImplicationGraph, Reason, certify_by_shrinking,
                          exact_shrunk_pair_law, lit_node, shrink, shrunk_pair_distribution_check,
                          solve_2sat)
from plsat.weights import build_concrete, distribution, from_weights

from conftest import random_formula


def test_lit_node():
    assert [lit_node(x) for x in (1, -1, 2, -2)] == [0, 1, 2, 3]


def test_implication_graph_edges():
    g = ImplicationGraph(Formula.from_clauses(2, [(1, -2)]))
    # (x1 or not x2): not x1 -> not x2, x2 -> x1
    assert g.edges() == {(1, 3), (2, 0)}
    assert g.is_contrapositive_closed()


def test_implication_graph_needs_width_two():
    with pytest.raises(FormulaError):
        ImplicationGraph(Formula.from_clauses(3, [(1, 2, 3)]))


def test_contrapositive_closure_random(rng):
    for _ in range(50):
        f = random_formula(rng, 8, 20, 2)
        assert ImplicationGraph(f).is_contrapositive_closed()


def test_two_sat_against_brute_force(rng):
    for _ in range(2000):
        n = int(rng.integers(2, 7))
        f = random_formula(rng, n, int(rng.integers(0, 12)), 2)
        cert = solve_2sat(f)
        assert cert.status is brute_force_status(f)
        if cert.status is Status.SAT:
            assert satisfies(f, cert.assignment)


def test_two_sat_classic_unsat():
    f = Formula.from_clauses(2, [(1, 2), (1, -2), (-1, 2), (-1, -2)])
    assert solve_2sat(f).status is Status.UNSAT


def test_certificate_invariants():
    with pytest.raises(ValueError):
        Certificate(Status.SAT, Reason.TWO_SAT_SCC)
    with pytest.raises(ValueError):
        Certificate(Status.UNSAT, Reason.SHRUNK_UNSAT)


def test_shrink_keeps_lightest_literals():
    ws = from_weights([1, 5, 2, 3, 4])  # sorted to [1, 2, 3, 4, 5]
    f = Formula.from_clauses(5, [(-1, 3, 5), (2, -4, 5), (-3, 4, -5)], provenance={"seed": 1})
    g = shrink(f, ws)
    assert g.clause_list() == [(-1, 3), (2, -4), (-3, 4)]
    assert g.provenance == {"seed": 1, "shrunk_from_k": 3}


def test_shrink_ties_go_to_lower_index():
    ws = from_weights([1, 1, 1, 1])
    g = shrink(Formula.from_clauses(4, [(2, -3, 4)]), ws)
    assert g.clause_list() == [(2, -3)]


def test_shrink_identity_on_two_cnf():
    f = Formula.from_clauses(3, [(1, 2)])
    assert shrink(f, build_concrete(3, 3.0)) is f


def test_certify_is_one_sided(rng):
    ws = build_concrete(8, 2.5)
    for _ in range(500):
        f = random_formula(rng, 8, int(rng.integers(1, 30)), 3)
        cert = certify_by_shrinking(f, ws)
        if cert.status is Status.SAT:
            assert satisfies(f, cert.assignment)
        else:
            assert cert.status is Status.UNKNOWN and cert.reason is Reason.SHRUNK_UNSAT


def _enumerated_pair_law(vd, ws, k):
    n = vd.n
    rank = {v: r for r, v in enumerate(np.lexsort((np.arange(n), ws.weights)))}
    total = 0.0
    law = np.zeros((n, n))
    for s in itertools.combinations(range(n), k):
        w = float(np.prod(vd.p[list(s)]))
        total += w
        i, j = sorted(sorted(s, key=rank.get)[:2])
        law[i, j] += w
    return law / total


@pytest.mark.parametrize("n,k", [(4, 3), (6, 3), (7, 4)])
def test_exact_pair_law_matches_enumeration(n, k):
    ws = build_concrete(n, 2.7)
    vd = distribution(ws)
    q = exact_shrunk_pair_law(vd, ws, k)
    q = np.triu(q + q.T, 1)
    assert np.allclose(q, _enumerated_pair_law(vd, ws, k), atol=1e-15)
    assert q.sum() == pytest.approx(1.0)


def test_pair_law_check_small_sample():
    ws = build_concrete(12, 3.0)
    rep = shrunk_pair_distribution_check(distribution(ws), ws, 3, 50_000, 3)
    assert rep.impossible_hits == 0
    assert rep.max_sigma < 5
