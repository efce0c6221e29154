"""Elliptic functions P_k(z, q) as Laurent series in z over q-series, their
numeric evaluation, the Jacobi theta function, and the prime form.
"""
from __future__ import annotations

import cmath
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import numpy as np

from .errors import DomainError, PoleError
from .exact import QSeries, eisenstein, eta_series, qder

__all__ = [
    "ZLaurentSeries",
    "LogSeries",
    "EllipticDomain",
    "pk_series",
    "pk_eval",
    "eisenstein_eval",
    "theta1_eval",
    "theta1_terms",
    "theta1_heat_residual",
    "eta_eval",
    "prime_form_eval",
    "verify_p0_heat",
    "verify_p4form",
    "weierstrass_pde_residual",
    "verify_weierstrass_pde",
    "PDEReport",
]

DEFAULT_NZ = 40
DEFAULT_NQ = 40
Z_MAX = 1.0
Q_MAX = 0.2


@dataclass(frozen=True)
class EllipticDomain:
    """Truncation orders and trusted radii for numeric evaluation."""

    nz: int = DEFAULT_NZ
    nq: int = DEFAULT_NQ
    z_max: float = Z_MAX
    q_max: float = Q_MAX


DEFAULT_DOMAIN = EllipticDomain()


class ZLaurentSeries:
    """Truncated Laurent series in z with :class:`QSeries` coefficients.

    Coefficients of ``z**e`` are known for ``e < truncation``; every
    coefficient series is truncated at the common order ``nq``.
    """

    __slots__ = ("coeffs", "truncation", "nq")

    def __init__(self, coeffs, truncation, nq):
        self.truncation = int(truncation)
        self.nq = int(nq)
        clean = {}
        for e, c in coeffs.items():
            if e >= self.truncation:
                continue
            c = c.truncate(self.nq)
            if not c.is_zero():
                clean[int(e)] = c
        self.coeffs = clean

    @property
    def pole_order(self):
        return max(0, -min(self.coeffs, default=0))

    def valuation(self):
        return min(self.coeffs, default=self.truncation)

    def coefficient(self, e):
        if e >= self.truncation:
            raise IndexError(f"coefficient of z^{e} is beyond truncation {self.truncation}")
        return self.coeffs.get(e, QSeries({}, self.nq))

    def is_zero(self):
        return not self.coeffs

    def __neg__(self):
        return ZLaurentSeries({e: -c for e, c in self.coeffs.items()}, self.truncation, self.nq)

    def __add__(self, other):
        if isinstance(other, QSeries):
            other = ZLaurentSeries({0: other}, self.truncation, other.truncation)
        if not isinstance(other, ZLaurentSeries):
            return NotImplemented
        n = min(self.truncation, other.truncation)
        out = dict(self.coeffs)
        for e, c in other.coeffs.items():
            out[e] = out[e] + c if e in out else c
        return ZLaurentSeries(out, n, min(self.nq, other.nq))

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return ZLaurentSeries({e: c * other for e, c in self.coeffs.items()}, self.truncation, self.nq)
        if isinstance(other, QSeries):
            return ZLaurentSeries({e: c * other for e, c in self.coeffs.items()},
                                  self.truncation, min(self.nq, other.truncation))
        if not isinstance(other, ZLaurentSeries):
            return NotImplemented
        n = min(self.truncation + other.valuation(), other.truncation + self.valuation())
        out = {}
        for e1, c1 in self.coeffs.items():
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e >= n:
                    continue
                out[e] = out[e] + c1 * c2 if e in out else c1 * c2
        return ZLaurentSeries(out, n, min(self.nq, other.nq))

    __rmul__ = __mul__

    def dz(self):
        return ZLaurentSeries({e - 1: c * e for e, c in self.coeffs.items() if e},
                              self.truncation - 1, self.nq)

    def qder(self):
        return ZLaurentSeries({e: qder(c) for e, c in self.coeffs.items()}, self.truncation, self.nq)

    def __repr__(self):
        return f"ZLaurentSeries(exponents={sorted(self.coeffs)}, truncation={self.truncation}, nq={self.nq})"


@dataclass(frozen=True)
class LogSeries:
    """``log_coefficient * log(z) + regular``."""

    log_coefficient: Fraction
    regular: ZLaurentSeries = field(compare=False)


@lru_cache(maxsize=None)
def pk_series(k, nz=12, nq=12):
    """Laurent expansion of P_k in z to order ``nz`` with q-coefficients to order ``nq``.

    ``P_k = z**-k + (-1)**k sum_{n>=k} E_n C(n-1, k-1) z**(n-k)`` for k >= 1;
    for k = 0 returns ``-log z + sum_{n>=2} E_n z**n / n`` as a :class:`LogSeries`.
    """
    if k < 0:
        raise ValueError("k must be non-negative")
    if nz < 1 or nq < 1:
        raise ValueError("truncation orders must be positive")
    if k == 0:
        coeffs = {n: eisenstein(n, nq) * Fraction(1, n) for n in range(2, nz, 2)}
        return LogSeries(Fraction(-1), ZLaurentSeries(coeffs, nz, nq))
    coeffs = {-k: QSeries.one(nq)}
    sign = -1 if k % 2 else 1
    for n in range(max(k, 2), nz + k):
        if n % 2:
            continue
        coeffs[n - k] = eisenstein(n, nq) * (sign * comb(n - 1, k - 1))
    return ZLaurentSeries(coeffs, nz, nq)


# ---------------------------------------------------------------------------
# numerics


def _check_q(q, domain):
    q = complex(q)
    if not (abs(q) <= domain.q_max):
        raise DomainError(f"|q| = {abs(q):.3g} exceeds q_max = {domain.q_max}")
    return q


def _check_z(z, domain, allow_zero=False):
    z = complex(z)
    if z == 0 and not allow_zero:
        raise PoleError("P_k has a pole at z = 0")
    if not (abs(z) <= domain.z_max):
        raise DomainError(f"|z| = {abs(z):.3g} exceeds z_max = {domain.z_max}")
    return z


@lru_cache(maxsize=None)
def _float_table(k, nz, nq):
    """Exponents and float q-coefficient rows of pk_series (regular part for k = 0)."""
    s = pk_series(k, nz, nq)
    if k == 0:
        s = s.regular
    exps = sorted(s.coeffs)
    table = np.zeros((len(exps), nq), dtype=float)
    for row, e in enumerate(exps):
        for m, c in s.coeffs[e].coeffs.items():
            table[row, m] = float(c)
    table.setflags(write=False)
    return np.array(exps, dtype=np.int64), table


def _qpowers(q, nq):
    return q ** np.arange(nq)


def eisenstein_eval(k, q, domain=DEFAULT_DOMAIN):
    """Numeric E_k(q) from the truncated q-expansion."""
    q = _check_q(q, domain)
    return eisenstein(k, domain.nq).evaluate(q)


def pk_eval(k, z, q, domain=DEFAULT_DOMAIN):
    """Numeric P_k(z, q): q-coefficients evaluated first, then the z-Laurent sum."""
    q = _check_q(q, domain)
    z = _check_z(z, domain)
    exps, table = _float_table(k, domain.nz, domain.nq)
    coeffs = table @ _qpowers(q, domain.nq)
    value = complex(np.sum(coeffs * np.complex128(z) ** exps))
    if k == 0:
        value -= cmath.log(z)
    return value


def theta1_terms(n_terms):
    """Exact term list of theta_1 for ``-n_terms-1 <= n <= n_terms``.

    Each entry is ``(coefficient, q_exponent, z_exponent)`` for the monomial
    ``coefficient * q**q_exponent * exp(z * z_exponent)``; the overall factor
    ``i`` is left out.  q-exponents are ``1/8 + integer``, z-exponents half-integers.
    """
    out = []
    for n in range(-n_terms - 1, n_terms + 1):
        b = Fraction(2 * n + 1, 2)
        out.append((-1 if n % 2 else 1, b * b / 2, b))
    return out


def theta1_heat_residual(n_terms=50):
    """Per-term residual of ``2 q d/dq theta_1 - d^2/dz^2 theta_1``, all exact Fractions."""
    return [c * (2 * a - b * b) for c, a, b in theta1_terms(n_terms)]


def theta1_eval(z, q, n_terms=30):
    """``i * sum_n (-1)^n q^((n+1/2)^2/2) e^((n+1/2) z)`` over ``-n_terms-1 <= n <= n_terms``.

    The fractional power ``q^(1/8)`` uses the principal branch.
    """
    z, q = complex(z), complex(q)
    if not abs(q) < 1:
        raise DomainError("theta_1 needs |q| < 1")
    q8 = cmath.exp(cmath.log(q) / 8) if q != 0 else 0j
    total = 0j
    for n in range(-n_terms - 1, n_terms + 1):
        b = n + 0.5
        m = (n * n + n) // 2
        total += (-1) ** (n % 2) * q ** m * cmath.exp(b * z)
    return 1j * q8 * total


def eta_eval(q, nq=DEFAULT_NQ):
    q = complex(q)
    if not abs(q) < 1:
        raise DomainError("eta needs |q| < 1")
    return eta_series(nq).evaluate(q)


def prime_form_eval(z, q, domain=DEFAULT_DOMAIN):
    """K(z, q) = exp(-P_0) = z * exp(-(regular part of P_0))."""
    q = _check_q(q, domain)
    z = _check_z(z, domain, allow_zero=True)
    if z == 0:
        return 0j
    exps, table = _float_table(0, domain.nz, domain.nq)
    regular = complex(np.sum((table @ _qpowers(q, domain.nq)) * np.complex128(z) ** exps))
    return z * cmath.exp(-regular)


# ---------------------------------------------------------------------------
# exact identity checks


def verify_p0_heat(nz=12, nq=12):
    """Residual ``2 q dP_0/dq - (P_2 - P_1^2 - 3 E_2)``; zero as a truncated series."""
    p0 = pk_series(0, nz + 2, nq).regular
    p1 = pk_series(1, nz + 1, nq)
    p2 = pk_series(2, nz, nq)
    lhs = p0.qder() * 2
    rhs = p2 - p1 * p1 - eisenstein(2, nq) * 3
    res = lhs - rhs
    return ZLaurentSeries(res.coeffs, min(res.truncation, nz), nq)


def verify_p4form(nz=12, nq=12):
    """Residual ``q dE_2/dq + 2 E_2 P_2 + P_4 - P_2^2`` in the single variable x."""
    e2 = eisenstein(2, nq)
    p2 = pk_series(2, nz + 2, nq)
    p4 = pk_series(4, nz, nq)
    res = p2 * e2 * 2 + p4 - p2 * p2 + qder(e2)
    return ZLaurentSeries(res.coeffs, min(res.truncation, nz), nq)


def weierstrass_pde_residual(x, y, q, domain=DEFAULT_DOMAIN):
    """``[q d/dq - P_1(x) d/dx - P_1(y) d/dy + P_2(x) + P_2(y)] P_2(x-y) - P_2(x) P_2(y)``.

    The q- and z-derivatives of P_2(x - y) are taken analytically:
    ``q dP_2/dq = 3 P_4 - P_2^2 - 2 P_1 P_3`` and ``dP_2/dz = -2 P_3``.
    """
    x, y = complex(x), complex(y)
    for w in (x, y, x - y):
        if w == 0:
            raise PoleError("x, y and x - y must be nonzero")
    d = x - y
    p = {k: pk_eval(k, d, q, domain) for k in (1, 2, 3, 4)}
    p1x, p2x = pk_eval(1, x, q, domain), pk_eval(2, x, q, domain)
    p1y, p2y = pk_eval(1, y, q, domain), pk_eval(2, y, q, domain)
    dq_p2 = 3 * p[4] - p[2] ** 2 - 2 * p[1] * p[3]
    dx_p2 = -2 * p[3]
    dy_p2 = 2 * p[3]
    lhs = dq_p2 - p1x * dx_p2 - p1y * dy_p2 + (p2x + p2y) * p[2]
    return lhs - p2x * p2y


@dataclass
class PDEReport:
    residuals: list
    tol: float

    @property
    def max_residual(self):
        return max(self.residuals, default=0.0)

    @property
    def passed(self):
        return self.max_residual < self.tol


def verify_weierstrass_pde(samples, tol=1e-8, domain=DEFAULT_DOMAIN):
    """Evaluate the Weierstrass PDE residual at each ``(x, y, q)`` sample."""
    residuals = [abs(weierstrass_pde_residual(x, y, q, domain)) for x, y, q in samples]
    return PDEReport(residuals, tol)
