import itertools
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from virasoro.errors import DegenerateConfiguration
from virasoro.exact import Poly
from virasoro.genus0 import (
    PointConfig,
    beta_permanent,
    g0_derangement_sum,
    g0_generating,
    g0_pde_residual,
    g0_zhu,
    verify_g0_pde,
    weight_matrix,
)
from virasoro.sampling import rational_matrix, rational_points, rng

C = Poly.var("C")


def det(m):
    n = len(m)
    if n == 0:
        return 1
    return sum((-1) ** j * m[0][j] * det([row[:j] + row[j + 1:] for row in m[1:]]) for j in range(n))


def naive_perm(a):
    n = len(a)
    total = 0
    for p in itertools.permutations(range(n)):
        prod = 1
        for i in range(n):
            prod *= a[i][p[i]]
        total += prod
    return total


def test_weight_matrix():
    a = weight_matrix(PointConfig([0, 1, 3]))
    assert a[0][1] == 1 and a[1][2] == Fraction(1, 4)
    assert all(a[i][i] == 0 for i in range(3))
    assert all(a[i][j] == a[j][i] for i in range(3) for j in range(3))


def test_coincident_points():
    with pytest.raises(DegenerateConfiguration):
        PointConfig([0, 1, 0])


def test_beta_permanent_small():
    a = Fraction(3, 7)
    assert beta_permanent([[0, a], [a, 0]], C) == C * a * a
    assert beta_permanent([], C) == 1


def test_determinant_law():
    r = rng(1)
    for n in (3, 4):
        for _ in range(20):
            a = rational_matrix(r, n)
            assert beta_permanent(a, -1) == (-1) ** n * det(a)
            assert beta_permanent(a, 1) == naive_perm(a)


def test_closed_forms():
    assert g0_generating(PointConfig([Fraction(5, 2)])) == 0
    assert g0_generating(PointConfig([])) == 1
    r = rng(2)
    for _ in range(20):
        z = rational_points(r, 3)
        z12, z13, z23 = z[0] - z[1], z[0] - z[2], z[1] - z[2]
        assert g0_generating(PointConfig(z[:2])) == C / 2 / z12 ** 4
        assert g0_generating(PointConfig(z)) == C / (z12 * z13 * z23) ** 2


def test_cli_examples():
    assert g0_generating(PointConfig([0, 1])) == C / 2
    assert g0_generating(PointConfig([0, 1, 2])) == C / 4


@pytest.mark.parametrize("n", range(2, 7))
def test_triple_oracle(n):
    r = rng(10 + n)
    for _ in range(3):
        cfg = PointConfig(rational_points(r, n))
        a = g0_derangement_sum(cfg)
        assert a == g0_generating(cfg) == g0_zhu(cfg)


def test_zhu_fixed_configuration():
    cfg = PointConfig([0, 1, 2, 4])
    assert g0_zhu(cfg) == g0_generating(cfg)


def test_numeric_central_charge():
    cfg = PointConfig([0, 1, 3, Fraction(1, 2)], central_charge=Fraction(1, 2))
    sym = g0_generating(PointConfig(cfg.points))
    assert g0_generating(cfg) == sym.evaluate(C=Fraction(1, 2)) == g0_zhu(cfg)


def test_complex_points():
    cfg = PointConfig([0.1 + 0.2j, -0.3, 0.5j, 0.7], central_charge=2.0)
    assert abs(g0_generating(cfg) - g0_derangement_sum(cfg)) < 1e-9 * abs(g0_generating(cfg))


def test_permutation_symmetry():
    r = rng(3)
    z = rational_points(r, 5)
    ref = g0_generating(PointConfig(z))
    for p in itertools.islice(itertools.permutations(z), 0, 120, 7):
        assert g0_generating(PointConfig(p)) == ref


def test_homogeneity():
    r = rng(4)
    for n in (2, 3, 4, 5):
        z = rational_points(r, n)
        lam = Fraction(-3, 2)
        scaled = g0_generating(PointConfig([lam * x for x in z]))
        assert scaled == g0_generating(PointConfig(z)) * lam ** (-2 * n)


small = st.builds(Fraction, st.integers(-9, 9), st.integers(1, 4))


@settings(max_examples=40, deadline=None)
@given(st.lists(st.lists(small, min_size=3, max_size=3), min_size=3, max_size=3),
       st.lists(small, min_size=3, max_size=3), small, st.integers(0, 2))
def test_multilinearity(a, row, s, i):
    b = [list(r) for r in a]
    b[i] = row
    c = [list(r) for r in a]
    c[i] = [x + s * y for x, y in zip(a[i], row)]
    assert beta_permanent(c, C) == beta_permanent(a, C) + beta_permanent(b, C) * s


def test_pde():
    assert g0_pde_residual(1, 2) == 0
    assert g0_pde_residual(Fraction(3, 7), Fraction(-2, 5)) == 0
    with pytest.raises(DegenerateConfiguration):
        g0_pde_residual(1, 1)
    rep = verify_g0_pde([(1, 2), (Fraction(1, 3), 5)])
    assert rep["passed"]
