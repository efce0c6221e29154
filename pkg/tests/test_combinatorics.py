from math import comb, factorial

import pytest

from virasoro.combinatorics import (
    METHODS,
    PartialInjection,
    Permutation,
    d_poly,
    enumerate_derangements,
    enumerate_partial_injections,
    enumerate_permutations,
    p_poly,
)
from virasoro.errors import LimitError
from virasoro.exact import Poly

A = Poly.var("alpha")
B = Poly.var("beta")


@pytest.mark.parametrize("n,count", [(0, 1), (1, 0), (2, 1), (3, 2), (4, 9), (5, 44), (6, 265)])
def test_derangement_counts(n, count):
    assert sum(1 for _ in enumerate_derangements(n)) == count


@pytest.mark.parametrize("n,count", [(0, 1), (1, 2), (2, 7), (3, 34), (4, 209)])
def test_partial_injection_counts(n, count):
    assert sum(1 for _ in enumerate_partial_injections(n)) == count
    assert count == sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))


def test_enumeration_is_lexicographic():
    perms = [p.images for p in enumerate_permutations(4)]
    assert perms == sorted(perms)
    assert len(perms) == 24
    key = [tuple(0 if j is None else j for j in p.images) for p in enumerate_partial_injections(3)]
    assert key == sorted(key)


def test_limits():
    with pytest.raises(LimitError):
        list(enumerate_derangements(10))
    with pytest.raises(LimitError):
        list(enumerate_partial_injections(8))
    with pytest.raises(LimitError):
        list(enumerate_partial_injections(3, n_max=2))
    assert sum(1 for _ in enumerate_partial_injections(3, n_max=3)) == 34


def test_partial_injection_statistics():
    for n in range(5):
        for psi in enumerate_partial_injections(n):
            assert psi.num_necklaces == n - len(psi.domain)
            covered = sorted(v for comp in psi.components[0] + psi.components[1] for v in comp)
            assert covered == list(range(1, n + 1))


def test_components_example():
    psi = PartialInjection((2, 3, None, 4, 5, None, 6))
    # paths 1->2->3 and 7->6; 4 and 5 are fixed points
    cycles, necklaces = psi.components
    assert cycles == ((4,), (5,))
    assert sorted(necklaces) == [(1, 2, 3), (7, 6)]
    psi = PartialInjection((1, 3, 2, None))
    assert psi.num_cycles == 2 and psi.num_necklaces == 1


def test_invalid_maps():
    with pytest.raises(ValueError):
        Permutation((1, 1, 2))
    with pytest.raises(ValueError):
        PartialInjection((2, 2, None))


@pytest.mark.parametrize("n", range(10))
def test_d_methods_agree(n):
    ref = d_poly(n, "closed_form")
    for m in METHODS:
        assert d_poly(n, m) == ref


@pytest.mark.parametrize("n", range(8))
def test_p_methods_agree(n):
    ref = p_poly(n, "closed_form")
    for m in METHODS:
        assert p_poly(n, m) == ref


def test_known_d_values():
    assert d_poly(0) == 1
    assert d_poly(2) == B
    assert d_poly(3) == B * 2
    assert d_poly(4) == B ** 2 * 3 + B * 6
    assert [d_poly(n).evaluate(beta=1) for n in range(1, 7)] == [0, 1, 2, 9, 44, 265]


def test_known_p_values():
    assert p_poly(1) == A + B
    assert p_poly(2) == A ** 2 + A * B * 2 + B ** 2 + A * 2 + B
    assert p_poly(3) == (A ** 3 + A ** 2 * B * 3 + A ** 2 * 6 + A * B ** 2 * 3 + A * B * 9 + A * 6
                         + B ** 3 + B ** 2 * 3 + B * 2)


@pytest.mark.parametrize("n", range(8))
def test_p_total_count(n):
    assert p_poly(n).evaluate(alpha=1, beta=1) == sum(comb(n, k) ** 2 * factorial(k) for k in range(n + 1))


@pytest.mark.parametrize("n", range(1, 7))
def test_p_alpha_zero_is_rising_factorial(n):
    rising = Poly.const(1)
    for j in range(n):
        rising = rising * (B + j)
    assert p_poly(n).subs(alpha=0) == rising


def test_unknown_method():
    with pytest.raises(ValueError):
        d_poly(3, "magic")
