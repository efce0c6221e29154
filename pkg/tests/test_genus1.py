import itertools

import pytest

from virasoro.combinatorics import enumerate_derangements, p_poly
from virasoro.errors import LimitError
from virasoro.exact import Poly
from virasoro.genus1 import (
    GammaExpr,
    alphabeta_pperm,
    compare_numeric,
    counting_polynomial,
    gamma1_closed_form,
    gamma2_closed_form,
    gamma3_closed_form,
    gamma3_lines,
    gamma_graph,
    gamma_perm,
    gamma_perm_terms,
    gamma_pperm,
    gamma_zhu,
    gweight_matrix,
    partial_permanent,
)
from virasoro.sampling import genus1_samples
from virasoro.scalar import ScalarPoly, eis, pfun

C = Poly.var("C")
HALF_C = C / 2
ALPHA = Poly.var("alpha")
BETA = Poly.var("beta")


def test_gamma0():
    for f in (gamma_graph, gamma_pperm, gamma_perm, gamma_zhu):
        assert f(0) == GammaExpr(0, {0: 1})


@pytest.mark.parametrize("f", [gamma_graph, gamma_pperm, gamma_perm, gamma_zhu])
def test_gamma1(f):
    assert f(1) == GammaExpr(1, {1: 1, 0: eis(2) * HALF_C}) == gamma1_closed_form()


def test_gamma2():
    e2, p = eis(2), pfun(2, 1, 2)
    assert gamma_graph(2) == GammaExpr(2, {2: 1, 1: e2 * C + p * 2, 0: (e2 * HALF_C) ** 2 + p * p * HALF_C})
    assert gamma_graph(2) == gamma2_closed_form()


def test_gamma3_closed_form():
    g = gamma_graph(3)
    assert g == gamma3_closed_form()
    assert gamma_perm(3) == g


def test_gamma3_line_grouping():
    lines = gamma3_lines()
    by_cycles = {}
    for pi, g in gamma_perm_terms(3):
        by_cycles.setdefault(pi.num_cycles, []).append(g)
    identity, = by_cycles[3]
    assert identity == lines[0]
    assert sum(by_cycles[2], GammaExpr(3)) == sum(lines[1:5], GammaExpr(3))
    assert sum(by_cycles[1], GammaExpr(3)) == sum(lines[5:7], GammaExpr(3))
    assert len(by_cycles[2]) == 3 and len(by_cycles[1]) == 2


@pytest.mark.parametrize("n", range(6))
def test_structural_triple_equality(n):
    g = gamma_graph(n)
    assert g == gamma_pperm(n)
    assert g == gamma_perm(n)


@pytest.mark.parametrize("n", range(7))
def test_counting_consistency(n):
    assert counting_polynomial(gamma_graph(n)) == p_poly(n)


@pytest.mark.parametrize("n", range(1, 6))
def test_top_coefficient(n):
    g = gamma_graph(n)
    assert max(g.keys()) == n
    assert g[n] == ScalarPoly.one()


@pytest.mark.parametrize("n", [3, 4])
def test_relabel_symmetry(n):
    g = gamma_graph(n)
    for perm in itertools.permutations(range(1, n + 1)):
        assert g.relabel(dict(zip(range(1, n + 1), perm))) == g


@pytest.mark.parametrize("n", range(2, 5))
def test_genus0_substructure(n):
    m0 = gamma_graph(n)[0]
    no_e = ScalarPoly({mono: c for mono, c in m0.terms.items() if all(a.kind == "P" for a in mono)})
    expected = ScalarPoly.zero()
    for phi in enumerate_derangements(n):
        term = ScalarPoly.const(HALF_C ** phi.num_cycles)
        for i in range(1, n + 1):
            term = term * pfun(2, i, phi(i))
        expected = expected + term
    assert no_e == expected


def test_partial_permanent_examples():
    assert partial_permanent([[5]]) == 6
    a, b, c, d = 2, 3, 5, 7
    assert partial_permanent([[a, b], [c, d]]) == 1 + a + b + c + d + a * d + b * c
    assert partial_permanent([[0] * 3 for _ in range(3)]) == 1


@pytest.mark.parametrize("n", range(6))
def test_alphabeta_pperm_counts(n):
    ones = [[1] * n for _ in range(n)]
    assert alphabeta_pperm(ones, ALPHA, BETA) == p_poly(n)


def test_alphabeta_specialisation():
    a = [[1, 2, 0], [3, 0, 4], [5, 6, 7]]
    assert alphabeta_pperm(a, 1, 1) == partial_permanent(a)


def test_weight_matrix_entries():
    w = gweight_matrix(3)
    assert w[0][0] == eis(2)
    assert w[1][0] == pfun(2, 1, 2) == w[0][1]


def test_limit():
    with pytest.raises(LimitError):
        gamma_graph(7)


def test_compare_identical():
    g = gamma_graph(2)
    rep = compare_numeric(g, g, genus1_samples(1, 2, 3), 1.3, 1e-12)
    assert rep.worst == 0 and rep.passed


def test_zhu_n2_is_not_structurally_equal():
    # equality with the graph sum needs the P4 limit identity
    assert gamma_zhu(2) != gamma_graph(2)
    assert any(a.k == 4 for c in gamma_zhu(2).coeffs.values() for a in c.atoms())


def test_zhu_n2_numeric():
    rep = compare_numeric(gamma_zhu(2), gamma_graph(2), genus1_samples(2, 2, 10), 1.3, 1e-8)
    assert rep.passed, rep.max_residual


@pytest.mark.parametrize("n", [3, 4])
def test_zhu_numeric(n):
    samples = genus1_samples(20 + n, n, 5, min_separation=0.25)
    rep = compare_numeric(gamma_zhu(n), gamma_graph(n), samples, 1.3, 1e-7)
    assert rep.passed, rep.max_residual


def test_zhu_detects_wrong_expression():
    bad = gamma_graph(3) + GammaExpr(3, {1: pfun(2, 1, 2)})
    rep = compare_numeric(gamma_zhu(3), bad, genus1_samples(5, 3, 2, min_separation=0.25), 1.3, 1e-7)
    assert not rep.passed
