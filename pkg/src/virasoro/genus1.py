"""Genus one Virasoro generating functions Gamma_n.

``Gamma_n`` is a :class:`GammaExpr`, a finite map ``M -> ScalarPoly`` standing for
``sum_M c_M (q d/dq)^M Theta`` with Theta kept abstract.  Four constructions:

* :func:`gamma_graph` -- sum over partial injections (genus one graphs);
* :func:`gamma_pperm` -- the alpha,beta-extended partial permanent of the edge
  weight matrix, read through the alpha -> (q d/dq) map;
* :func:`gamma_perm` -- the sum over permutations with rho-truncated cycle weights;
* :func:`gamma_zhu` -- the genus one Zhu recursion.

The first three agree exactly in the free atom algebra; the Zhu recursion only
agrees modulo elliptic identities, so it is compared numerically.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

from .combinatorics import enumerate_partial_injections, enumerate_permutations
from .elliptic import DEFAULT_DOMAIN
from .errors import LimitError
from .exact import Poly
from .scalar import ScalarPoly, dq, dz, eis, eval_numeric, pfun

__all__ = [
    "GammaExpr",
    "GAMMA_NMAX",
    "gweight_matrix",
    "gamma_graph",
    "partial_permanent",
    "alphabeta_pperm",
    "gamma_pperm",
    "gamma_perm",
    "gamma_perm_terms",
    "gamma_zhu",
    "compare_numeric",
    "CompareReport",
    "counting_polynomial",
    "gamma1_closed_form",
    "gamma2_closed_form",
    "gamma3_lines",
    "gamma3_closed_form",
]

GAMMA_NMAX = 6

C = Poly.var("C")
HALF_C = C / 2
ALPHA = Poly.var("alpha")
RHO = Poly.var("rho")


class GammaExpr:
    """``{M: ScalarPoly}``: the coefficient of ``(q d/dq)^M Theta`` for each M."""

    __slots__ = ("n", "coeffs")

    def __init__(self, n, coeffs=None):
        self.n = n
        clean = {}
        for m, c in (coeffs or {}).items():
            if not isinstance(c, ScalarPoly):
                c = ScalarPoly.const(c)
            if not c.is_zero():
                if m < 0:
                    raise ValueError("theta-derivative order must be non-negative")
                clean[int(m)] = c
        self.coeffs = clean

    def __getitem__(self, m):
        return self.coeffs.get(m, ScalarPoly.zero())

    def keys(self):
        return sorted(self.coeffs)

    def items(self):
        return sorted(self.coeffs.items())

    def __add__(self, other):
        out = dict(self.coeffs)
        for m, c in other.coeffs.items():
            out[m] = out[m] + c if m in out else c
        return GammaExpr(max(self.n, other.n), out)

    def __sub__(self, other):
        return self + other.scale(-1)

    def scale(self, s):
        return GammaExpr(self.n, {m: c * s for m, c in self.coeffs.items()})

    def map(self, func):
        return GammaExpr(self.n, {m: func(c) for m, c in self.coeffs.items()})

    def relabel(self, mapping):
        return self.map(lambda c: c.relabel(mapping))

    def __eq__(self, other):
        if not isinstance(other, GammaExpr):
            return NotImplemented
        return self.coeffs == other.coeffs

    __hash__ = None

    def __str__(self):
        if not self.coeffs:
            return "0"
        return "\n".join(f"[M={m}] {c}" for m, c in sorted(self.coeffs.items(), reverse=True))

    def __repr__(self):
        return f"GammaExpr(n={self.n}, keys={self.keys()})"


def _check(n, n_max):
    if n < 0:
        raise ValueError("n must be non-negative")
    if n > n_max:
        raise LimitError(f"n = {n} exceeds n_max = {n_max}; pass a larger n_max to override")


def gweight_matrix(n):
    """Edge weights ``W_ii = E_2``, ``W_ij = P_2(z_i - z_j)``; rows/cols indexed from 0."""
    return [[eis(2) if i == j else pfun(2, i, j) for j in range(1, n + 1)] for i in range(1, n + 1)]


# ---------------------------------------------------------------------------
# graph sum


def gamma_graph(n, n_max=GAMMA_NMAX):
    """Sum over genus one graphs: ``(C/2)^K prod W_{i psi(i)}`` placed at ``M`` = necklaces."""
    _check(n, n_max)
    w = gweight_matrix(n)
    half_c_pow = [Poly.const(1)]
    for _ in range(n):
        half_c_pow.append(half_c_pow[-1] * HALF_C)
    acc = {}
    for psi in enumerate_partial_injections(n, n_max=max(n, n_max)):
        term = ScalarPoly.const(half_c_pow[psi.num_cycles])
        for i, j in psi.edges():
            term = term * w[i - 1][j - 1]
        m = psi.num_necklaces
        acc[m] = acc[m] + term if m in acc else term
    return GammaExpr(n, acc)


# ---------------------------------------------------------------------------
# partial permanents


def alphabeta_pperm(a, alpha, beta):
    """``sum_psi alpha^N(psi) beta^K(psi) prod_{i in dom psi} a[i][psi(i)]`` over partial injections.

    Rows are expanded in turn (row i either leaves the domain or picks an unused
    column), carrying the running product; zero entries are skipped.
    """
    n = len(a)
    if any(len(row) != n for row in a):
        raise ValueError("alphabeta_pperm needs a square matrix")
    apow, bpow = [1], [1]
    for _ in range(n):
        apow.append(apow[-1] * alpha)
        bpow.append(bpow[-1] * beta)
    image = [None] * n
    used = [False] * n
    total = 0

    def stats():
        hit = [False] * n
        for j in image:
            if j is not None:
                hit[j] = True
        necklaces = hit.count(False)
        seen = [False] * n
        for s in range(n):
            if not hit[s]:
                i = s
                while i is not None and not seen[i]:
                    seen[i] = True
                    i = image[i]
        cycles = 0
        for s in range(n):
            if not seen[s]:
                cycles += 1
                i = s
                while not seen[i]:
                    seen[i] = True
                    i = image[i]
        return necklaces, cycles

    def rec(i, prod):
        nonlocal total
        if i == n:
            nk, cy = stats()
            term = apow[nk] * bpow[cy]
            total = total + (term if prod is None else term * prod)
            return
        image[i] = None
        rec(i + 1, prod)
        row = a[i]
        for j in range(n):
            if used[j] or row[j] == 0:
                continue
            used[j] = True
            image[i] = j
            rec(i + 1, row[j] if prod is None else prod * row[j])
            used[j] = False
        image[i] = None

    rec(0, None)
    return total


def partial_permanent(a):
    """Sum over partial injections of the product of selected entries; the empty map gives 1."""
    return alphabeta_pperm(a, 1, 1)


def _l_map(p, var, n):
    """Read powers of ``var`` in the coefficients as theta-derivative orders."""
    out = {}
    for mono, coeff in p.terms.items():
        for power, rest in coeff.coefficients_in(var).items():
            out.setdefault(power, {})[mono] = rest
    return GammaExpr(n, {m: ScalarPoly(t) for m, t in out.items()})


def gamma_pperm(n, n_max=GAMMA_NMAX):
    """``L_alpha(pperm_{alpha, C/2} W)``."""
    _check(n, n_max)
    if n == 0:
        return GammaExpr(0, {0: ScalarPoly.one()})
    value = alphabeta_pperm(gweight_matrix(n), ScalarPoly.const(ALPHA), ScalarPoly.const(HALF_C))
    return _l_map(value, "alpha", n)


# ---------------------------------------------------------------------------
# permutation graphs


def _cycle_weight(cycle, w):
    """``(C/2) T_rho(prod (2/C rho + W_e))`` over the edges of one cycle.

    With ``s = (2/C) rho`` the truncation keeps ``c0 + c1 s``; the ``C/2``
    prefactor then gives ``(C/2) c0 + rho c1`` without leaving Q[C].
    """
    c0 = ScalarPoly.one()
    c1 = ScalarPoly.zero()
    r = len(cycle)
    for t in range(r):
        edge = w[cycle[t] - 1][cycle[(t + 1) % r] - 1]
        c0, c1 = c0 * edge, c1 * edge + c0
    return c0 * HALF_C + c1 * RHO


def gamma_perm_terms(n, n_max=GAMMA_NMAX):
    """Per-permutation contributions ``(permutation, GammaExpr)`` in lexicographic order."""
    _check(n, n_max)
    w = gweight_matrix(n)
    out = []
    for pi in enumerate_permutations(n, n_max=max(n, n_max)):
        value = ScalarPoly.one()
        for cyc in pi.cycles:
            value = value * _cycle_weight(cyc, w)
        out.append((pi, _l_map(value, "rho", n)))
    return out


def gamma_perm(n, n_max=GAMMA_NMAX):
    """Sum over permutation graphs with rho-truncated cycle weights, read through L_rho."""
    total = GammaExpr(n)
    for _, g in gamma_perm_terms(n, n_max):
        total = total + g
    return total


# ---------------------------------------------------------------------------
# Zhu recursion


@lru_cache(maxsize=None)
def _zhu(labels):
    if not labels:
        return GammaExpr(0, {0: ScalarPoly.one()})
    first, rest = labels[0], labels[1:]
    lower = _zhu(rest)
    e2_term = eis(2) * HALF_C
    acc = {}

    def add(m, c):
        if not c.is_zero():
            acc[m] = acc[m] + c if m in acc else c

    # eta^C q d/dq (eta^-C Gamma_{n-1})
    for m, c in lower.coeffs.items():
        add(m + 1, c)
        add(m, e2_term * c + dq(c))
    for k in rest:
        p1, p2, p4 = pfun(1, first, k), pfun(2, first, k), pfun(4, first, k)
        for m, c in lower.coeffs.items():
            add(m, p1 * dz(k, c) + p2 * c * 2)
        skipped = _zhu(tuple(x for x in rest if x != k))
        for m, c in skipped.coeffs.items():
            add(m, p4 * c * HALF_C)
    return GammaExpr(len(labels), acc)


def gamma_zhu(n, n_max=GAMMA_NMAX):
    """Gamma_n from the genus one Zhu recursion, labels ``1..n`` with 1 removed first."""
    _check(n, n_max)
    return _zhu(tuple(range(1, n + 1)))


# ---------------------------------------------------------------------------


@dataclass
class CompareReport:
    tol: float
    max_residual: dict = field(default_factory=dict)
    max_magnitude: dict = field(default_factory=dict)

    @property
    def worst(self):
        return max(self.max_residual.values(), default=0.0)

    @property
    def passed(self):
        return self.worst < self.tol


def compare_numeric(a, b, samples, c_val, tol=1e-8, domain=DEFAULT_DOMAIN):
    """Evaluate each theta-coefficient of ``a`` and ``b`` at ``(points, q)`` samples.

    Residuals are absolute: ``|a_M - b_M|``; the largest per M is reported.
    """
    report = CompareReport(tol)
    keys = sorted(set(a.coeffs) | set(b.coeffs))
    for m in keys:
        report.max_residual[m] = 0.0
        report.max_magnitude[m] = 0.0
    for points, q in samples:
        cache = {}
        for m in keys:
            va = eval_numeric(a[m], points, q, c_val, domain, cache)
            vb = eval_numeric(b[m], points, q, c_val, domain, cache)
            report.max_residual[m] = max(report.max_residual[m], abs(va - vb))
            report.max_magnitude[m] = max(report.max_magnitude[m], abs(va), abs(vb))
    return report


def counting_polynomial(gamma):
    """Set every atom to 1 and C/2 to beta; return ``sum_M alpha^M c_M`` as a Poly."""
    beta2 = Poly.var("beta") * 2
    total = Poly.const(0)
    for m, c in gamma.coeffs.items():
        flat = Poly.const(0)
        for coeff in c.terms.values():
            flat = flat + coeff.subs(C=beta2)
        total = total + flat * ALPHA ** m
    return total


# ---------------------------------------------------------------------------
# closed forms for small n, grouped line by line


def gamma1_closed_form():
    """``(q d/dq + (C/2) E_2) Theta``."""
    return GammaExpr(1, {1: 1, 0: eis(2) * HALF_C})


def gamma2_closed_form():
    e2, p = eis(2), pfun(2, 1, 2)
    return GammaExpr(2, {
        2: 1,
        1: e2 * C + p * 2,
        0: (e2 * HALF_C) ** 2 + p * p * HALF_C,
    })


def gamma3_lines():
    """The seven lines of the n = 3 closed form, each as a GammaExpr."""
    e2 = eis(2)
    p12, p13, p23 = pfun(2, 1, 2), pfun(2, 1, 3), pfun(2, 2, 3)
    ce2 = e2 * HALF_C
    s1 = p12 + p13 + p23
    s2 = p12 * p12 + p13 * p13 + p23 * p23
    pairs = p12 * p13 + p12 * p23 + p13 * p23
    return [
        GammaExpr(3, {3: 1, 2: ce2 * 3, 1: ce2 * ce2 * 3, 0: ce2 ** 3}),
        GammaExpr(3, {2: s1 * 2}),
        GammaExpr(3, {1: e2 * s1 * C}),
        GammaExpr(3, {1: s2 * HALF_C}),
        GammaExpr(3, {0: e2 * s2 * (C * C / 4)}),
        GammaExpr(3, {1: pairs * 2}),
        GammaExpr(3, {0: p12 * p13 * p23 * C}),
    ]


def gamma3_closed_form():
    total = GammaExpr(3)
    for line in gamma3_lines():
        total = total + line
    return total
