"""Exact rational arithmetic: polynomials in the fixed variables C, alpha, beta, rho
and truncated q-series with a fractional exponent offset.

Rationals are :class:`fractions.Fraction`; that type already keeps a positive,
reduced denominator.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb, factorial
from numbers import Rational

from .errors import NotInvertible

__all__ = [
    "VARIABLES",
    "Poly",
    "QSeries",
    "bernoulli",
    "eisenstein",
    "eta_series",
    "qder",
    "ek_recursion_residual",
    "modular_derivative",
    "DEFAULT_NQ",
]

DEFAULT_NQ = 24

VARIABLES = ("C", "alpha", "beta", "rho")
_NVARS = len(VARIABLES)
_ZERO_EXP = (0,) * _NVARS


def _as_fraction(c):
    if isinstance(c, Fraction):
        return c
    if isinstance(c, (int, Rational)):
        return Fraction(c)
    raise TypeError(f"expected an exact rational, got {type(c).__name__}")


def _var_index(name):
    try:
        return VARIABLES.index(name)
    except ValueError:
        raise KeyError(f"unknown polynomial variable {name!r}; expected one of {VARIABLES}") from None


class Poly:
    """Polynomial over Q in the ordered variables ``C, alpha, beta, rho``.

    Terms are stored as ``{exponent_tuple: Fraction}`` with zero coefficients
    dropped.  Instances are treated as immutable.
    """

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for exps, c in terms.items():
                exps = tuple(exps)
                if len(exps) != _NVARS:
                    raise ValueError(f"exponent vector {exps} must have length {_NVARS}")
                if any(e < 0 for e in exps):
                    raise ValueError(f"negative exponent in {exps}")
                c = _as_fraction(c)
                if c:
                    clean[exps] = clean.get(exps, 0) + c
                    if not clean[exps]:
                        del clean[exps]
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def const(cls, c):
        c = _as_fraction(c)
        return cls._raw({_ZERO_EXP: c} if c else {})

    @classmethod
    def var(cls, name, power=1):
        exps = [0] * _NVARS
        exps[_var_index(name)] = power
        return cls._raw({tuple(exps): Fraction(1)})

    @classmethod
    def coerce(cls, other):
        if isinstance(other, Poly):
            return other
        return cls.const(other)

    @property
    def terms(self):
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def __len__(self):
        return len(self._terms)

    def __bool__(self):
        return bool(self._terms)

    def is_constant(self):
        return not self._terms or set(self._terms) == {_ZERO_EXP}

    def constant_term(self):
        return self._terms.get(_ZERO_EXP, Fraction(0))

    def degree(self, name):
        i = _var_index(name)
        return max((e[i] for e in self._terms), default=-1)

    def coefficients_in(self, name):
        """Split into ``{power: Poly}`` by the power of one variable."""
        i = _var_index(name)
        out = {}
        for exps, c in self._terms.items():
            k = exps[i]
            rest = exps[:i] + (0,) + exps[i + 1:]
            out.setdefault(k, {})[rest] = c
        return {k: Poly._raw(t) for k, t in out.items()}

    # arithmetic -----------------------------------------------------------
    def __neg__(self):
        return Poly._raw({e: -c for e, c in self._terms.items()})

    def __add__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        out = dict(self._terms)
        for e, c in other._terms.items():
            v = out.get(e, 0) + c
            if v:
                out[e] = v
            else:
                out.pop(e, None)
        return Poly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, Poly):
            try:
                other = Poly.const(other)
            except TypeError:
                return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, Poly):
            try:
                c = _as_fraction(other)
            except TypeError:
                return NotImplemented
            if not c:
                return Poly._raw({})
            return Poly._raw({e: v * c for e, v in self._terms.items()})
        out = {}
        for e1, c1 in self._terms.items():
            for e2, c2 in other._terms.items():
                e = (e1[0] + e2[0], e1[1] + e2[1], e1[2] + e2[2], e1[3] + e2[3])
                v = out.get(e, 0) + c1 * c2
                if v:
                    out[e] = v
                else:
                    out.pop(e, None)
        return Poly._raw(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        c = _as_fraction(other)
        if not c:
            raise ZeroDivisionError("Poly division by zero")
        return Poly._raw({e: v / c for e, v in self._terms.items()})

    def __pow__(self, n):
        if not isinstance(n, int) or n < 0:
            raise ValueError("Poly powers must be non-negative integers")
        result = Poly.const(1)
        base = self
        while n:
            if n & 1:
                result = result * base
            base = base * base
            n >>= 1
        return result

    def __eq__(self, other):
        if isinstance(other, Poly):
            return self._terms == other._terms
        try:
            c = _as_fraction(other)
        except TypeError:
            return NotImplemented
        if not c:
            return not self._terms
        return self._terms == {_ZERO_EXP: c}

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    # substitution / evaluation -------------------------------------------
    def subs(self, **values):
        """Substitute variables by numbers or Polys; returns a Poly."""
        idx = {_var_index(k): Poly.coerce(v) for k, v in values.items()}
        out = Poly._raw({})
        cache = {}
        for exps, c in self._terms.items():
            term = Poly.const(c)
            keep = list(exps)
            for i, val in idx.items():
                if exps[i]:
                    key = (i, exps[i])
                    if key not in cache:
                        cache[key] = val ** exps[i]
                    term = term * cache[key]
                    keep[i] = 0
            term = term * Poly._raw({tuple(keep): Fraction(1)})
            out = out + term
        return out

    def evaluate(self, **values):
        """Evaluate to a number; every variable that occurs must be given."""
        total = 0
        for exps, c in self._terms.items():
            term = c
            for i, e in enumerate(exps):
                if e:
                    name = VARIABLES[i]
                    if name not in values:
                        raise KeyError(f"no value supplied for variable {name}")
                    term = term * values[name] ** e
            total = total + term
        return total

    # display ----------------------------------------------------------------
    def sorted_terms(self):
        """Terms in descending total degree then lexicographic exponent order."""
        return sorted(self._terms.items(), key=lambda t: (-sum(t[0]), tuple(-x for x in t[0])))

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for exps, c in self.sorted_terms():
            mono = "*".join(
                VARIABLES[i] if e == 1 else f"{VARIABLES[i]}^{e}" for i, e in enumerate(exps) if e
            )
            sign = "-" if c < 0 else "+"
            a = abs(c)
            if not mono:
                body = str(a)
            else:
                body = mono
                if a.numerator != 1:
                    body = f"{a.numerator}*{body}"
                if a.denominator != 1:
                    body = f"{body}/{a.denominator}"
            parts.append((sign, body))
        first_sign, first = parts[0]
        text = ("-" if first_sign == "-" else "") + first
        for sign, body in parts[1:]:
            text += f" {sign} {body}"
        return text

    def __repr__(self):
        return f"Poly({self})"


# ---------------------------------------------------------------------------
# q-series


def _is_zero(c):
    return not c


def _check_offset(offset):
    offset = _as_fraction(offset)
    if 24 % offset.denominator:
        raise ValueError(f"q-offset {offset} must have denominator dividing 24")
    return offset


class QSeries:
    """``q**offset * sum_e coeffs[e] q**e`` with coefficients known for ``e < truncation``.

    Coefficients are Fractions or :class:`Poly` values.  An offset of 1 or
    more is folded into the integer exponents so offsets stay in ``(-inf, 1)``.
    """

    __slots__ = ("offset", "coeffs", "truncation")

    def __init__(self, coeffs=None, truncation=DEFAULT_NQ, offset=0):
        offset = _check_offset(offset)
        shift = 0
        if offset >= 1:
            shift = offset.numerator // offset.denominator
            offset -= shift
        clean = {}
        if coeffs:
            items = coeffs.items() if isinstance(coeffs, dict) else enumerate(coeffs)
            for e, c in items:
                e = int(e)
                if e < 0:
                    raise ValueError("QSeries exponents must be non-negative")
                if not isinstance(c, Poly):
                    c = _as_fraction(c)
                e += shift
                if e < truncation + shift and not _is_zero(c):
                    clean[e] = c
        self.offset = offset
        self.coeffs = clean
        self.truncation = int(truncation) + shift

    @classmethod
    def _raw(cls, coeffs, truncation, offset):
        obj = cls.__new__(cls)
        obj.offset = offset
        obj.coeffs = coeffs
        obj.truncation = truncation
        return obj

    @classmethod
    def one(cls, truncation=DEFAULT_NQ):
        return cls({0: 1}, truncation)

    @classmethod
    def constant(cls, c, truncation=DEFAULT_NQ):
        return cls({0: c}, truncation)

    def coefficient(self, e):
        if e >= self.truncation:
            raise IndexError(f"coefficient of q^{e} is beyond truncation {self.truncation}")
        return self.coeffs.get(e, Fraction(0))

    def as_list(self):
        return [self.coefficient(e) for e in range(self.truncation)]

    def valuation(self):
        return min(self.coeffs, default=self.truncation)

    def is_zero(self):
        return not self.coeffs

    def truncate(self, n):
        n = min(n, self.truncation)
        return QSeries._raw({e: c for e, c in self.coeffs.items() if e < n}, n, self.offset)

    # alignment of offsets differing by an integer
    def _shifted_to(self, offset):
        d = self.offset - offset
        if d.denominator != 1 or d < 0:
            raise ValueError(f"cannot align q-offsets {self.offset} and {offset}")
        d = int(d)
        return QSeries._raw({e + d: c for e, c in self.coeffs.items()}, self.truncation + d, offset)

    @staticmethod
    def _align(a, b):
        if a.offset == b.offset:
            return a, b
        if a.offset > b.offset:
            return a._shifted_to(b.offset), b
        return a, b._shifted_to(a.offset)

    def __neg__(self):
        return QSeries._raw({e: -c for e, c in self.coeffs.items()}, self.truncation, self.offset)

    def __add__(self, other):
        if not isinstance(other, QSeries):
            if isinstance(other, (int, Fraction, Poly)):
                if self.offset != 0:
                    raise ValueError("cannot add a constant to a series with fractional offset")
                other = QSeries._raw({0: other} if other else {}, self.truncation, self.offset)
            else:
                return NotImplemented
        a, b = QSeries._align(self, other)
        n = min(a.truncation, b.truncation)
        out = {e: c for e, c in a.coeffs.items() if e < n}
        for e, c in b.coeffs.items():
            if e >= n:
                continue
            v = out.get(e, 0) + c
            if _is_zero(v):
                out.pop(e, None)
            else:
                out[e] = v
        return QSeries._raw(out, n, a.offset)

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, (QSeries, int, Fraction, Poly)):
            return self + (-other)
        return NotImplemented

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, QSeries):
            if isinstance(other, (int, Fraction, Poly)):
                if _is_zero(other):
                    return QSeries._raw({}, self.truncation, self.offset)
                out = {}
                for e, c in self.coeffs.items():
                    v = c * other
                    if not _is_zero(v):
                        out[e] = v
                return QSeries._raw(out, self.truncation, self.offset)
            return NotImplemented
        n = min(self.truncation + other.valuation(), other.truncation + self.valuation())
        out = {}
        for e1, c1 in self.coeffs.items():
            if e1 >= n:
                continue
            for e2, c2 in other.coeffs.items():
                e = e1 + e2
                if e >= n:
                    continue
                v = out.get(e, 0) + c1 * c2
                if _is_zero(v):
                    out.pop(e, None)
                else:
                    out[e] = v
        offset = self.offset + other.offset
        if offset >= 1:
            return QSeries(out, n, offset)
        return QSeries._raw(out, n, offset)

    __rmul__ = __mul__

    def __pow__(self, k):
        if not isinstance(k, int) or k < 0:
            raise ValueError("QSeries powers must be non-negative integers")
        result = QSeries._raw({0: Fraction(1)}, self.truncation, Fraction(0))
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if not other:
                raise ZeroDivisionError("QSeries division by zero")
            return self * (Fraction(1) / Fraction(other))
        if not isinstance(other, QSeries):
            return NotImplemented
        return self * other.inverse()

    def inverse(self):
        """Multiplicative inverse; the leading coefficient must be a nonzero rational."""
        v = self.valuation()
        if v >= self.truncation:
            raise NotInvertible("cannot invert a series with no known nonzero coefficient")
        lead = self.coeffs[v]
        if isinstance(lead, Poly):
            if not lead.is_constant():
                raise NotInvertible("leading coefficient is a non-constant polynomial")
            lead = lead.constant_term()
        n = self.truncation - v
        a = [self.coeffs.get(v + i, 0) for i in range(n)]
        inv_lead = Fraction(1) / lead
        b = [Fraction(0)] * n
        b[0] = inv_lead
        for m in range(1, n):
            acc = 0
            for i in range(1, m + 1):
                if not _is_zero(a[i]):
                    acc = acc + a[i] * b[m - i]
            b[m] = -acc * inv_lead
        offset = -self.offset - v
        return QSeries._raw({e: c for e, c in enumerate(b) if not _is_zero(c)}, n, offset)

    def __eq__(self, other):
        """Equal offsets and agreement on every coefficient both series know."""
        if isinstance(other, (int, Fraction)):
            other = QSeries({0: other} if other else {}, self.truncation, self.offset)
        if not isinstance(other, QSeries):
            return NotImplemented
        try:
            a, b = QSeries._align(self, other)
        except ValueError:
            return False
        n = min(a.truncation, b.truncation)
        return a.truncate(n).coeffs == b.truncate(n).coeffs

    __hash__ = None

    def qder(self):
        return qder(self)

    def evaluate(self, q):
        """Numeric value of the truncated sum at complex ``q`` (principal branch for the offset)."""
        q = complex(q)
        total = 0j
        if self.coeffs:
            top = max(self.coeffs)
            for e in range(top, -1, -1):
                c = self.coeffs.get(e, 0)
                total = total * q + complex(float(c))
        if self.offset:
            if q == 0:
                return 0j if self.offset > 0 else complex("inf")
            total *= q ** float(self.offset)
        return total

    def __repr__(self):
        body = ", ".join(f"{e}: {c}" for e, c in sorted(self.coeffs.items()))
        return f"QSeries(offset={self.offset}, {{{body}}}, truncation={self.truncation})"


def qder(s):
    """``q d/dq`` applied term-wise: ``q**(offset+e) -> (offset+e) q**(offset+e)``."""
    out = {}
    for e, c in s.coeffs.items():
        w = s.offset + e
        if w:
            out[e] = c * w
    return QSeries._raw(out, s.truncation, s.offset)


@lru_cache(maxsize=None)
def bernoulli(k):
    """Bernoulli number B_k with ``z/(e^z - 1) = sum B_k z^k/k!`` (so B_1 = -1/2)."""
    if k < 0:
        raise ValueError("bernoulli index must be non-negative")
    if k == 0:
        return Fraction(1)
    acc = sum(comb(k + 1, j) * bernoulli(j) for j in range(k))
    return -acc / (k + 1)


def _divisor_power_sum(m, p):
    total = 0
    d = 1
    while d * d <= m:
        if m % d == 0:
            total += d ** p
            e = m // d
            if e != d:
                total += e ** p
        d += 1
    return total


@lru_cache(maxsize=None)
def eisenstein(k, nq=DEFAULT_NQ):
    """E_k(q) to order ``nq``: ``-B_k/k! + 2/(k-1)! sum_m sigma_{k-1}(m) q^m``; zero for odd k."""
    if k < 2:
        raise ValueError("Eisenstein series needs k >= 2")
    if nq < 1:
        raise ValueError("truncation must be at least 1")
    if k % 2:
        return QSeries({}, nq)
    coeffs = {0: -bernoulli(k) / factorial(k)}
    scale = Fraction(2, factorial(k - 1))
    for m in range(1, nq):
        coeffs[m] = scale * _divisor_power_sum(m, k - 1)
    return QSeries(coeffs, nq)


@lru_cache(maxsize=None)
def eta_series(nq=DEFAULT_NQ):
    """Dedekind eta: offset 1/24 times ``prod_{n>=1} (1 - q^n)`` truncated below ``q**nq``."""
    if nq < 1:
        raise ValueError("truncation must be at least 1")
    poly = [0] * nq
    poly[0] = 1
    for n in range(1, nq):
        for e in range(nq - 1, n - 1, -1):
            poly[e] -= poly[e - n]
    return QSeries(dict(enumerate(poly)), nq, Fraction(1, 24))


def ek_recursion_residual(k, nq=DEFAULT_NQ):
    """``q dE_k/dq`` minus its quadratic expression in Eisenstein series; identically zero."""
    if k < 2 or k % 2:
        raise ValueError("k must be even and at least 2")
    rhs = eisenstein(k + 2, nq) * Fraction(k * (k + 3), 2)
    for r in range(2, k + 1):
        rhs = rhs - eisenstein(r, nq) * eisenstein(k + 2 - r, nq) * Fraction(k, 2)
    return qder(eisenstein(k, nq)) - rhs


def modular_derivative(k, f, nq=DEFAULT_NQ):
    """``D_k f = q df/dq + k E_2 f``."""
    out = qder(f)
    if k:
        out = out + eisenstein(2, nq) * f * k
    return out.truncate(nq)
