"""Derangements, partial injections and their cycle/necklace counting polynomials.

Labels are ``1..n`` throughout.  ``d_n(beta)`` counts derangements by cycles;
``p_n(alpha, beta)`` counts partial injections by necklaces (alpha) and cycles (beta).
"""
from __future__ import annotations

from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import factorial

from .errors import LimitError
from .exact import Poly

__all__ = [
    "Permutation",
    "PartialInjection",
    "enumerate_permutations",
    "enumerate_derangements",
    "enumerate_partial_injections",
    "d_poly",
    "p_poly",
    "METHODS",
    "DERANGEMENT_NMAX",
    "PARTIAL_NMAX",
]

DERANGEMENT_NMAX = 9
PARTIAL_NMAX = 7
METHODS = ("enumeration", "closed_form", "recursion", "egf")

ALPHA = Poly.var("alpha")
BETA = Poly.var("beta")


@dataclass(frozen=True)
class Permutation:
    """A bijection of ``{1..n}``; ``images[i-1]`` is the image of ``i``."""

    images: tuple

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"{self.images} is not a permutation of 1..{len(self.images)}")

    @property
    def n(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i - 1]

    @cached_property
    def cycles(self):
        seen = set()
        out = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = []
            i = start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            out.append(tuple(cyc))
        return tuple(out)

    @property
    def num_cycles(self):
        return len(self.cycles)

    def is_derangement(self):
        return all(self(i) != i for i in range(1, self.n + 1))


@dataclass(frozen=True)
class PartialInjection:
    """An injective partial map on ``{1..n}``; ``images[i-1]`` is ``None`` off the domain."""

    images: tuple

    def __post_init__(self):
        n = len(self.images)
        defined = [j for j in self.images if j is not None]
        if len(set(defined)) != len(defined) or any(not 1 <= j <= n for j in defined):
            raise ValueError(f"{self.images} is not an injective partial map on 1..{n}")

    @property
    def n(self):
        return len(self.images)

    def __call__(self, i):
        return self.images[i - 1]

    @property
    def domain(self):
        return tuple(i for i in range(1, self.n + 1) if self(i) is not None)

    def edges(self):
        return [(i, self(i)) for i in self.domain]

    @cached_property
    def components(self):
        """``(cycles, necklaces)``; necklaces are vertex paths in edge direction."""
        image_set = {j for j in self.images if j is not None}
        seen = set()
        necklaces = []
        for start in range(1, self.n + 1):
            if start in image_set:
                continue
            path = [start]
            seen.add(start)
            i = self(start)
            while i is not None:
                path.append(i)
                seen.add(i)
                i = self(i)
            necklaces.append(tuple(path))
        cycles = []
        for start in range(1, self.n + 1):
            if start in seen:
                continue
            cyc = []
            i = start
            while i not in seen:
                seen.add(i)
                cyc.append(i)
                i = self(i)
            cycles.append(tuple(cyc))
        return tuple(cycles), tuple(necklaces)

    @property
    def num_cycles(self):
        """K: number of cycle components (1-cycles included)."""
        return len(self.components[0])

    @property
    def num_necklaces(self):
        """M (also written N): number of path components, single vertices included."""
        return len(self.components[1])


def _check_limit(n, n_max):
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > n_max:
        raise LimitError(f"n = {n} exceeds n_max = {n_max}; pass a larger n_max to override")


def enumerate_permutations(n, n_max=DERANGEMENT_NMAX):
    """All permutations of ``1..n`` in lexicographic order of image arrays."""
    _check_limit(n, n_max)
    yield from (Permutation(p) for p in _backtrack(n, allow_fixed=True, partial=False))


def enumerate_derangements(n, n_max=DERANGEMENT_NMAX):
    """Fixed-point-free permutations of ``1..n``, lexicographic on image arrays."""
    _check_limit(n, n_max)
    yield from (Permutation(p) for p in _backtrack(n, allow_fixed=False, partial=False))


def enumerate_partial_injections(n, n_max=PARTIAL_NMAX):
    """All injective partial self-maps of ``1..n`` including the empty map.

    Lexicographic on image arrays with "undefined" ordered before every label.
    """
    _check_limit(n, n_max)
    yield from (PartialInjection(p) for p in _backtrack(n, allow_fixed=True, partial=True))


def _backtrack(n, allow_fixed, partial):
    images = [None] * n
    used = [False] * (n + 1)

    def rec(i):
        if i == n:
            yield tuple(images)
            return
        if partial:
            images[i] = None
            yield from rec(i + 1)
        for j in range(1, n + 1):
            if used[j] or (not allow_fixed and j == i + 1):
                continue
            used[j] = True
            images[i] = j
            yield from rec(i + 1)
            used[j] = False
        images[i] = None

    return rec(0)


# ---------------------------------------------------------------------------
# counting polynomials


def _generalized_binomial(top, m):
    """``top (top-1) ... (top-m+1) / m!`` for a Poly ``top``."""
    out = Poly.const(1)
    for j in range(m):
        out = out * (top - j)
    return out / factorial(m)


def _exp_series(h, n):
    """Coefficients ``g_0..g_n`` of ``exp(sum_{r>=1} h[r] z^r)``."""
    g = [Poly.const(1)]
    for m in range(1, n + 1):
        acc = Poly.const(0)
        for j in range(1, m + 1):
            acc = acc + h[j] * g[m - j] * j
        g.append(acc / m)
    return g


def d_poly(n, method="closed_form"):
    """Derangements of ``n`` labels counted by number of cycles, as a Poly in beta."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if method == "enumeration":
        tally = Counter(p.num_cycles for p in enumerate_derangements(n, n_max=max(n, DERANGEMENT_NMAX)))
        return Poly({(0, 0, k, 0): c for k, c in tally.items()})
    if method == "closed_form":
        out = Poly.const(0)
        for i in range(n + 1):
            out = out + BETA ** i / factorial(i) * _generalized_binomial(-BETA, n - i)
        return out * ((-1) ** n * factorial(n))
    if method == "recursion":
        prev, cur = Poly.const(0), Poly.const(1)
        for m in range(1, n + 1):
            prev, cur = cur, (cur + BETA * prev) * (m - 1)
        return cur
    if method == "egf":
        # exp(beta * (-z - log(1 - z))) = exp(beta * sum_{r>=2} z^r / r)
        h = [Poly.const(0)] + [BETA * Fraction(1, r) if r >= 2 else Poly.const(0) for r in range(1, n + 1)]
        return _exp_series(h, n)[n] * factorial(n)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")


def p_poly(n, method="closed_form"):
    """Partial injections of ``n`` labels counted by necklaces (alpha) and cycles (beta)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    if method == "enumeration":
        tally = Counter((p.num_necklaces, p.num_cycles)
                        for p in enumerate_partial_injections(n, n_max=max(n, PARTIAL_NMAX)))
        return Poly({(0, m, k, 0): c for (m, k), c in tally.items()})
    if method == "closed_form":
        out = Poly.const(0)
        for i in range(n + 1):
            out = out + (-ALPHA) ** i / factorial(i) * _generalized_binomial(-BETA - i, n - i)
        return out * ((-1) ** n * factorial(n))
    if method == "recursion":
        # p_{m+1} = (2m + alpha + beta) p_m - m (m + beta - 1) p_{m-1}
        prev, cur = Poly.const(0), Poly.const(1)
        for m in range(n):
            prev, cur = cur, (ALPHA + BETA + 2 * m) * cur - (BETA + m - 1) * prev * m
        return cur
    if method == "egf":
        # exp(alpha z/(1-z)) (1-z)^(-beta) = exp(sum_{r>=1} (alpha + beta/r) z^r)
        h = [Poly.const(0)] + [ALPHA + BETA * Fraction(1, r) for r in range(1, n + 1)]
        return _exp_series(h, n)[n] * factorial(n)
    raise ValueError(f"unknown method {method!r}; expected one of {METHODS}")
