"""Polynomials in the elliptic atoms ``E_k`` and ``P_k(z_i - z_j)`` with
coefficients in Q[C], together with the derivations ``q d/dq`` and ``d/dz_k``.

The algebra is free on the atoms: no elliptic identities are imposed, so two
expressions that agree only modulo those identities compare unequal here and
must be compared numerically.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .elliptic import DEFAULT_DOMAIN, eisenstein_eval, pk_eval
from .exact import Poly

__all__ = [
    "Atom",
    "ScalarPoly",
    "eis",
    "pfun",
    "dq",
    "dz",
    "eval_numeric",
    "K_MAX",
]

K_MAX = 8


class Atom(NamedTuple):
    """``E_k`` (kind ``"E"``, i = j = 0) or ``P_k(z_i - z_j)`` with i < j (kind ``"P"``)."""

    kind: str
    k: int
    i: int = 0
    j: int = 0

    def __str__(self):
        if self.kind == "E":
            return f"E{self.k}"
        return f"P{self.k}({self.i},{self.j})"


def _merge(m1, m2):
    if not m1:
        return m2
    if not m2:
        return m1
    return tuple(sorted(m1 + m2))


def _coerce_coeff(c):
    return c if isinstance(c, Poly) else Poly.const(c)


class ScalarPoly:
    """``{monomial: Poly}`` where a monomial is a sorted tuple of atoms (repeats allowed)."""

    __slots__ = ("terms",)

    def __init__(self, terms=None):
        clean = {}
        if terms:
            for mono, c in terms.items():
                c = _coerce_coeff(c)
                if c:
                    mono = tuple(sorted(mono))
                    v = clean.get(mono)
                    v = c if v is None else v + c
                    if v:
                        clean[mono] = v
                    else:
                        clean.pop(mono, None)
        self.terms = clean

    @classmethod
    def _raw(cls, terms):
        obj = cls.__new__(cls)
        obj.terms = terms
        return obj

    @classmethod
    def const(cls, c):
        c = _coerce_coeff(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def zero(cls):
        return cls._raw({})

    @classmethod
    def one(cls):
        return cls.const(1)

    @classmethod
    def from_atom(cls, atom, coeff=1):
        return cls({(atom,): coeff})

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def atoms(self):
        return {a for mono in self.terms for a in mono}

    # arithmetic -------------------------------------------------------------
    def __neg__(self):
        return ScalarPoly._raw({m: -c for m, c in self.terms.items()})

    def __add__(self, other):
        if not isinstance(other, ScalarPoly):
            try:
                other = ScalarPoly.const(other)
            except TypeError:
                return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            v = out.get(m)
            v = c if v is None else v + c
            if v:
                out[m] = v
            else:
                out.pop(m, None)
        return ScalarPoly._raw(out)

    __radd__ = __add__

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, ScalarPoly):
            try:
                c = _coerce_coeff(other)
            except TypeError:
                return NotImplemented
            if not c:
                return ScalarPoly.zero()
            out = {}
            for m, v in self.terms.items():
                w = v * c
                if w:
                    out[m] = w
            return ScalarPoly._raw(out)
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                m = _merge(m1, m2)
                w = c1 * c2
                v = out.get(m)
                v = w if v is None else v + w
                if v:
                    out[m] = v
                else:
                    out.pop(m, None)
        return ScalarPoly._raw(out)

    __rmul__ = __mul__

    def __pow__(self, n):
        result = ScalarPoly.one()
        for _ in range(n):
            result = result * self
        return result

    def __eq__(self, other):
        if not isinstance(other, ScalarPoly):
            try:
                other = ScalarPoly.const(other)
            except TypeError:
                return NotImplemented
        return self.terms == other.terms

    __hash__ = None

    # structural maps ----------------------------------------------------------
    def map_coeffs(self, func):
        return ScalarPoly({m: func(c) for m, c in self.terms.items()})

    def substitute_atoms(self, func):
        """Replace each atom by ``func(atom)`` (a ScalarPoly, Poly or number) and expand."""
        cache = {}
        total = ScalarPoly.zero()
        for mono, c in self.terms.items():
            term = ScalarPoly.const(c)
            for a in mono:
                if a not in cache:
                    v = func(a)
                    cache[a] = v if isinstance(v, ScalarPoly) else ScalarPoly.const(v)
                term = term * cache[a]
            total = total + term
        return total

    def relabel(self, mapping):
        """Rename point labels by ``mapping`` and re-canonicalise P atoms."""
        def f(a):
            if a.kind == "E":
                return ScalarPoly.from_atom(a)
            return pfun(a.k, mapping.get(a.i, a.i), mapping.get(a.j, a.j))
        return self.substitute_atoms(f)

    def sorted_terms(self):
        return sorted(self.terms.items(), key=lambda t: (len(t[0]), t[0]))

    def __str__(self):
        if not self.terms:
            return "0"
        parts = []
        for mono, c in self.sorted_terms():
            atoms = "*".join(str(a) for a in mono)
            cs = str(c)
            if not atoms:
                parts.append(cs)
            elif cs == "1":
                parts.append(atoms)
            else:
                parts.append(f"({cs})*{atoms}")
        return " + ".join(parts)

    def __repr__(self):
        return f"ScalarPoly({self})"


def eis(k):
    """E_k as a ScalarPoly; zero for odd k."""
    if k < 2:
        raise ValueError("Eisenstein atoms need k >= 2")
    if k % 2:
        return ScalarPoly.zero()
    return ScalarPoly.from_atom(Atom("E", k))


def pfun(k, i, j):
    """P_k(z_i - z_j) in canonical form: swapped labels give ``(-1)^k P_k(z_j - z_i)``."""
    if k < 1:
        raise ValueError("P atoms need k >= 1")
    if i == j:
        raise ValueError("P_k(z_i - z_i) is a pole")
    if i < j:
        return ScalarPoly.from_atom(Atom("P", k, i, j))
    return ScalarPoly.from_atom(Atom("P", k, j, i), -1 if k % 2 else 1)


# ---------------------------------------------------------------------------
# derivations


def _derive(p, atom_rule):
    out = ScalarPoly.zero()
    for mono, c in p.terms.items():
        counts = {}
        for a in mono:
            counts[a] = counts.get(a, 0) + 1
        for a, r in counts.items():
            da = atom_rule(a)
            if da.is_zero():
                continue
            rest = list(mono)
            rest.remove(a)
            out = out + da * ScalarPoly._raw({tuple(rest): c * r})
    return out


def _dz_single(p):
    """d/dz on expressions in atoms of one argument: ``d P_m = -m P_(m+1)``, E constant."""
    def rule(a):
        if a.kind == "E":
            return ScalarPoly.zero()
        return ScalarPoly.from_atom(Atom("P", a.k + 1, a.i, a.j), -a.k)
    return _derive(p, rule)


@lru_cache(maxsize=None)
def _dq_eis(k):
    out = eis(k + 2) * Fraction(k * (k + 3), 2)
    for r in range(2, k + 1):
        out = out - eis(r) * eis(k + 2 - r) * Fraction(k, 2)
    return out


@lru_cache(maxsize=None)
def _dq_p_template(k):
    """q dP_k/dq for the pair (1, 2).

    Base case ``q dP_1/dq = P_3 - P_1 P_2``; higher k follow from
    ``P_(k+1) = -(1/k) dP_k/dz`` and the commutation of the two derivations.
    """
    if k == 1:
        return pfun(3, 1, 2) - pfun(1, 1, 2) * pfun(2, 1, 2)
    return _dz_single(_dq_p_template(k - 1)) * Fraction(-1, k - 1)


for _k in range(1, K_MAX + 1):
    _dq_p_template(_k)


def _dq_atom(a):
    if a.kind == "E":
        return _dq_eis(a.k)
    template = _dq_p_template(a.k)
    if (a.i, a.j) == (1, 2):
        return template
    return template.relabel({1: a.i, 2: a.j})


def dq(p):
    """``q d/dq`` extended from the atoms by the Leibniz rule."""
    return _derive(p, _dq_atom)


def dz(k, p):
    """``d/dz_k``: ``P_m(z_i - z_k) -> +m P_(m+1)``, ``P_m(z_k - z_j) -> -m P_(m+1)``."""
    def rule(a):
        if a.kind == "E" or k not in (a.i, a.j):
            return ScalarPoly.zero()
        sign = a.k if a.j == k else -a.k
        return ScalarPoly.from_atom(Atom("P", a.k + 1, a.i, a.j), sign)
    return _derive(p, rule)


# ---------------------------------------------------------------------------


def atom_value(a, points, q, domain=DEFAULT_DOMAIN):
    if a.kind == "E":
        return eisenstein_eval(a.k, q, domain)
    return pk_eval(a.k, complex(points[a.i - 1]) - complex(points[a.j - 1]), q, domain)


def eval_numeric(p, points, q, c_val, domain=DEFAULT_DOMAIN, cache=None):
    """Substitute atoms by their numeric values at ``(points, q)`` and C by ``c_val``."""
    cache = {} if cache is None else cache
    total = 0j
    for mono, coeff in p.terms.items():
        value = complex(coeff.evaluate(C=c_val))
        for a in mono:
            if a not in cache:
                cache[a] = atom_value(a, points, q, domain)
            value *= cache[a]
        total += value
    return total
