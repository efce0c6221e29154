"""Genus zero Virasoro generating functions G_n(z_1, ..., z_n).

Three constructions are provided and must agree:

* :func:`g0_generating`: the beta-extended permanent of ``a_ij = 1/(z_i - z_j)^2``
  at ``beta = C/2``;
* :func:`g0_derangement_sum`: the sum over derangements weighted by ``(C/2)^cycles``;
* :func:`g0_zhu`: the Zhu recursion, carried out symbolically on monomials in the
  differences ``z_ij`` and evaluated at the end.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .combinatorics import DERANGEMENT_NMAX, enumerate_derangements
from .errors import DegenerateConfiguration
from .exact import Poly

__all__ = [
    "PointConfig",
    "weight_matrix",
    "beta_permanent",
    "g0_generating",
    "g0_derangement_sum",
    "g0_zhu",
    "zhu_expression",
    "verify_g0_pde",
    "g0_pde_residual",
]

C = Poly.var("C")
HALF_C = C / 2


@dataclass(frozen=True)
class PointConfig:
    """Insertion points and a central charge (``None`` keeps C formal)."""

    points: tuple
    central_charge: object = None

    def __post_init__(self):
        object.__setattr__(self, "points", tuple(self.points))
        pts = self.points
        for i in range(len(pts)):
            for j in range(i + 1, len(pts)):
                if pts[i] == pts[j]:
                    raise DegenerateConfiguration(f"points {i + 1} and {j + 1} coincide at {pts[i]}")

    @property
    def n(self):
        return len(self.points)

    def half_c(self):
        c = self.central_charge
        if c is None:
            return HALF_C
        return Fraction(c, 2) if isinstance(c, int) else c / 2


def weight_matrix(cfg):
    """Symmetric matrix with ``a_ii = 0`` and ``a_ij = 1/(z_i - z_j)^2``."""
    pts = cfg.points
    n = len(pts)
    one = Fraction(1) if all(isinstance(z, (int, Fraction)) for z in pts) else 1.0
    a = [[0] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            if i != j:
                d = pts[i] - pts[j]
                if d == 0:
                    raise DegenerateConfiguration("coincident points")
                a[i][j] = one / (d * d)
    return a


def beta_permanent(a, beta):
    """``sum_{pi in S_n} beta^{cycles(pi)} prod_i a[i][pi(i)]`` over any commutative ring.

    Rows are expanded one at a time with running products; zero entries prune
    the search, so a zero diagonal restricts the sum to derangements.
    """
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("beta_permanent needs a square matrix")
    if n == 0:
        return 1
    powers = [1]
    for _ in range(n):
        powers.append(powers[-1] * beta)
    image = [0] * n
    used = [False] * n
    total = 0

    def cycles():
        seen = [False] * n
        count = 0
        for s in range(n):
            if not seen[s]:
                count += 1
                i = s
                while not seen[i]:
                    seen[i] = True
                    i = image[i]
        return count

    def rec(i, prod):
        nonlocal total
        if i == n:
            total = total + powers[cycles()] * prod
            return
        row = a[i]
        for j in range(n):
            if used[j] or row[j] == 0:
                continue
            used[j] = True
            image[i] = j
            rec(i + 1, row[j] if i == 0 else prod * row[j])
            used[j] = False

    rec(0, None)
    return total


def g0_generating(cfg):
    """G_n as ``perm_{C/2}`` of the weight matrix; a Poly in C when C is formal."""
    return _finish(beta_permanent(weight_matrix(cfg), cfg.half_c()), cfg)


def g0_derangement_sum(cfg, n_max=DERANGEMENT_NMAX):
    """G_n as the sum over derangements phi of ``(C/2)^K(phi) prod 1/z_{i phi(i)}^2``."""
    pts = cfg.points
    half_c = cfg.half_c()
    total = 0
    for phi in enumerate_derangements(cfg.n, n_max=max(n_max, cfg.n)):
        term = half_c ** phi.num_cycles
        for i in range(1, cfg.n + 1):
            d = pts[i - 1] - pts[phi(i) - 1]
            term = term * (Fraction(1) / (d * d) if isinstance(d, (int, Fraction)) else 1 / (d * d))
        total = total + term
    return _finish(total, cfg)


def _finish(value, cfg):
    return Poly.coerce(value) if cfg.central_charge is None else value


# ---------------------------------------------------------------------------
# symbolic Zhu recursion
#
# An expression is {monomial: Poly in C}; a monomial is a sorted tuple of
# ((i, j), e) with i < j meaning (z_i - z_j)**e.


def _mono_mul(mono, i, j, e):
    """Multiply a monomial by ``(z_i - z_j)**e``; returns ``(sign, monomial)``."""
    sign = 1
    if i > j:
        i, j = j, i
        if e % 2:
            sign = -1
    d = dict(mono)
    v = d.get((i, j), 0) + e
    if v:
        d[(i, j)] = v
    else:
        d.pop((i, j), None)
    return sign, tuple(sorted(d.items()))


def _add_term(expr, mono, coeff):
    v = expr.get(mono)
    v = coeff if v is None else v + coeff
    if v:
        expr[mono] = v
    else:
        expr.pop(mono, None)


def _dz(expr, k):
    """Partial derivative in z_k, term by term."""
    out = {}
    for mono, coeff in expr.items():
        for (i, j), e in mono:
            if k not in (i, j):
                continue
            s = e if i == k else -e
            _, new = _mono_mul(mono, i, j, -1)
            _add_term(out, new, coeff * s)
    return out


@lru_cache(maxsize=None)
def zhu_expression(labels):
    """Symbolic G for the ordered label tuple via the genus zero Zhu recursion.

    ``G(z_1..z_n) = sum_k (1/z_1k d/dz_k + 2/z_1k^2) G(z_2..z_n)
    + (C/2)/z_1k^4 G(z_2..^z_k..z_n)``, with ``G() = 1`` and ``G(z) = 0``.
    """
    labels = tuple(labels)
    if not labels:
        return {(): Poly.const(1)}
    if len(labels) == 1:
        return {}
    first, rest = labels[0], labels[1:]
    lower = zhu_expression(rest)
    out = {}
    for k in rest:
        for mono, coeff in _dz(lower, k).items():
            s, new = _mono_mul(mono, first, k, -1)
            _add_term(out, new, coeff * s)
        for mono, coeff in lower.items():
            s, new = _mono_mul(mono, first, k, -2)
            _add_term(out, new, coeff * (2 * s))
        skipped = zhu_expression(tuple(x for x in rest if x != k))
        for mono, coeff in skipped.items():
            s, new = _mono_mul(mono, first, k, -4)
            _add_term(out, new, coeff * HALF_C * s)
    return out


def _evaluate_expression(expr, points, central_charge):
    exact = all(isinstance(z, (int, Fraction)) for z in points)
    one = Fraction(1) if exact else 1.0
    cache = {}
    total = Poly.const(0) if central_charge is None else 0
    for mono, coeff in expr.items():
        value = one
        for (i, j), e in mono:
            key = (i, j)
            if key not in cache:
                d = points[i - 1] - points[j - 1]
                if d == 0:
                    raise DegenerateConfiguration(f"points {i} and {j} coincide")
                cache[key] = d
            value = value * (cache[key] ** e if e > 0 else one / cache[key] ** (-e))
        if central_charge is None:
            total = total + coeff * value
        else:
            total = total + coeff.evaluate(C=central_charge) * value
    return total


def g0_zhu(cfg):
    """G_n from the Zhu recursion, evaluated exactly at the configuration."""
    expr = zhu_expression(tuple(range(1, cfg.n + 1)))
    return _evaluate_expression(expr, cfg.points, cfg.central_charge)


# ---------------------------------------------------------------------------


def g0_pde_residual(x, y):
    """``(-(1/x) d/dx - (1/y) d/dy + 1/x^2 + 1/y^2) (x-y)^-2 - 1/(x^2 y^2)``, exactly."""
    x, y = Fraction(x), Fraction(y)
    if x == 0 or y == 0 or x == y:
        raise DegenerateConfiguration("x, y and x - y must all be nonzero")
    d = x - y
    f = 1 / d ** 2
    fx = -2 / d ** 3
    fy = 2 / d ** 3
    return -fx / x - fy / y + (1 / x ** 2 + 1 / y ** 2) * f - 1 / (x ** 2 * y ** 2)


def verify_g0_pde(samples):
    """Exact residuals at each ``(x, y)``; the identity demands all zero."""
    residuals = [g0_pde_residual(x, y) for x, y in samples]
    return {"residuals": residuals, "passed": all(r == 0 for r in residuals)}
