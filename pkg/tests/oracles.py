"""Independent reference implementations used by the tests.

Nothing here touches the contact basis.  Forms are kept in the plain
``(dx, du)`` coordinate basis, where ``d`` only needs ordinary partial
derivatives, and section pull-backs are computed by substituting
derivatives of the section directly.
"""

from __future__ import annotations

import itertools
from fractions import Fraction
from math import factorial

from jetvar.forms import DU, DX, Covector, Form, from_du_basis
from jetvar.jetring import BASE, FIBRE, JetCoord, JetPoly, PolySection


# -- du-basis exterior calculus ------------------------------------------


def _key(c: Covector):
    return (c.kind, c.index, tuple(c.sigma) if c.sigma is not None else ())


def _sort(word):
    keys = [_key(c) for c in word]
    if len(set(keys)) < len(keys):
        return 0, ()
    # bubble sort, counting swaps
    word, keys = list(word), list(keys)
    sign = 1
    for a in range(len(word)):
        for b in range(len(word) - 1 - a):
            if keys[b] > keys[b + 1]:
                keys[b], keys[b + 1] = keys[b + 1], keys[b]
                word[b], word[b + 1] = word[b + 1], word[b]
                sign = -sign
    return sign, tuple(word)


class DuForm:
    """``sum f dx^.. ^ du^..`` with plain dicts; no canonical contact structure."""

    def __init__(self, degree: int, terms=None):
        self.degree = degree
        self.terms: dict = {}
        for w, c in (terms or {}).items():
            self.add(w, JetPoly.coerce(c))

    def add(self, word, coeff, sign=1):
        s, w = _sort(word)
        if not s or not coeff:
            return
        prev = self.terms.get(w, JetPoly.zero())
        new = prev + (coeff if s * sign > 0 else -coeff)
        if new:
            self.terms[w] = new
        else:
            self.terms.pop(w, None)

    def __add__(self, other):
        out = DuForm(self.degree, self.terms)
        for w, c in other.terms.items():
            out.add(w, c)
        return out

    def wedge(self, other):
        out = DuForm(self.degree + other.degree)
        for (w1, c1), (w2, c2) in itertools.product(self.terms.items(), other.terms.items()):
            out.add(w1 + w2, c1 * c2)
        return out

    def d(self):
        out = DuForm(self.degree + 1)
        for w, f in self.terms.items():
            for v in f.variables():
                df = f.partial(v)
                if v.kind == BASE:
                    out.add((Covector.dx(v.index),) + w, df)
                else:
                    out.add((Covector(DU, v.index, v.sigma),) + w, df)
        return out

    def to_contact(self) -> Form:
        return from_du_basis(self.terms, self.degree)


def contact_to_du(a: Form) -> DuForm:
    """Expand every ``om^i_sigma`` as ``du^i_sigma - u^i_{sigma lam} dx^lam``."""
    out = DuForm(a.degree)
    for word, coeff in a.terms.items():
        partial = [((), coeff)]
        for c in word:
            if c.kind == DX:
                options = [(c, JetPoly.constant(1))]
            else:
                options = [(Covector(DU, c.index, c.sigma), JetPoly.constant(1))]
                for lam in range(len(c.sigma)):
                    coord = JetCoord.fibre(c.index, c.sigma.add(lam))
                    options.append((Covector.dx(lam), -JetPoly.variable(coord)))
            partial = [(w + (o,), f * g) for w, f in partial for o, g in options]
        for w, f in partial:
            out.add(w, f)
    return out


# -- section pull-back ---------------------------------------------------


def _section_derivative(s: PolySection, i: int, sigma) -> JetPoly:
    g = s.components[i]
    for lam, k in enumerate(sigma):
        for _ in range(k):
            g = g.partial(JetCoord.base(lam))
    return g


def pullback_du(a: DuForm, s: PolySection) -> DuForm:
    """``(j s)^* a``: ``du^i_sigma -> sum_lam d_lam d_sigma s^i dx^lam``."""
    n = s.space.n
    out = DuForm(a.degree)
    for word, coeff in a.terms.items():
        sub = {}
        for v in coeff.variables():
            if v.kind == FIBRE:
                sub[v] = _section_derivative(s, v.index, v.sigma)
        pulled = coeff.substitute(sub) if sub else coeff
        partial = [((), pulled)]
        for c in word:
            if c.kind == DX:
                partial = [(w + (c,), f) for w, f in partial]
            else:
                g = _section_derivative(s, c.index, c.sigma)
                partial = [
                    (w + (Covector.dx(lam),), f * g.partial(JetCoord.base(lam)))
                    for w, f in partial
                    for lam in range(n)
                ]
        for w, f in partial:
            out.add(w, f)
    return out


def horizontal_part_as_form(a: DuForm) -> Form:
    """A base-only du-form (no du factors) as a library :class:`Form`."""
    for w in a.terms:
        assert all(c.kind == DX for c in w), "not a form on the base"
    return Form(a.degree, a.terms)


# -- combinatorics ------------------------------------------------------


def brute_multiindices(n: int, max_order: int) -> list[tuple[int, ...]]:
    return [c for c in itertools.product(range(max_order + 1), repeat=n) if sum(c) <= max_order]


def count_sub_multisets(a, b) -> int:
    """Ways to pick the multiset ``b`` out of ``a`` with labelled copies."""
    labelled = [lam for lam, k in enumerate(a) for _ in range(k)]
    target = sorted(lam for lam, k in enumerate(b) for _ in range(k))
    return sum(
        1
        for pick in itertools.combinations(range(len(labelled)), len(target))
        if sorted(labelled[p] for p in pick) == target
    )


def interleavings(sigma, rho) -> int:
    """Number of ways to split the labelled word of ``sigma+rho`` into a ``rho`` part."""
    return count_sub_multisets(tuple(a + b for a, b in zip(sigma, rho)), rho)


# -- finite differences --------------------------------------------------


def finite_difference_partial(f: JetPoly, coord: JetCoord, point: dict) -> Fraction:
    """Exact derivative in ``coord`` at ``point`` via Lagrange interpolation.

    ``f`` restricted to the line through ``point`` is a polynomial of degree
    ``deg``; sampling ``deg + 1`` points and differentiating the interpolant
    at 0 is exact.
    """
    deg = max(f.degree(), 1)
    ts = list(range(deg + 1))
    vals = []
    for t in ts:
        p = dict(point)
        p[coord] = p.get(coord, 0) + t
        vals.append(Fraction(f.evaluate(p)))
    # derivative of the Lagrange basis polynomials at t = 0
    total = Fraction(0)
    for j, tj in enumerate(ts):
        others = [t for t in ts if t != tj]
        denom = 1
        for t in others:
            denom *= tj - t
        # d/dt prod (t - t_k) at t=0 = sum_k prod_{l != k} (0 - t_l)
        deriv = 0
        for k in range(len(others)):
            prod = 1
            for l, t in enumerate(others):
                if l != k:
                    prod *= -t
            deriv += prod
        total += vals[j] * Fraction(deriv, denom)
    return total


def multinomial(sigma) -> int:
    out = factorial(sum(sigma))
    for k in sigma:
        out //= factorial(k)
    return out

