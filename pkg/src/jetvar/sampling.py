"""Seeded random generators for polynomials, forms, sections and operators.

Everything draws from a caller-supplied :class:`random.Random`, so a seed
fixes the whole sequence of samples.  Sizes default to the small ranges the
property suites use (jet order <= 2, degree <= 3).
"""

from __future__ import annotations

import random
from fractions import Fraction

from .cdiff import CDiffOp
from .forms import Covector, Form, from_du_basis
from .jetring import JetCoord, JetPoly, JetSpace, PolySection
from .multiindex import MultiIndex, enumerate_multiindices


def random_coeff(rng: random.Random, size: int = 3) -> Fraction:
    num = rng.randint(-size, size) or 1
    return Fraction(num, rng.choice((1, 1, 1, 2, 3)))


def random_multiindex(rng: random.Random, n: int, max_order: int) -> MultiIndex:
    return rng.choice(list(enumerate_multiindices(n, max_order)))


def _coords(space: JetSpace, max_order: int, base: bool) -> list[JetCoord]:
    out = [JetCoord.base(lam) for lam in range(space.n)] if base else []
    for i in range(space.m):
        for sigma in enumerate_multiindices(space.n, max_order):
            out.append(JetCoord.fibre(i, sigma))
    return out


def random_poly(
    rng: random.Random,
    space: JetSpace,
    max_order: int = 2,
    max_degree: int = 3,
    terms: int = 3,
    base: bool = True,
    constant: bool = True,
) -> JetPoly:
    """Sum of up to ``terms`` random monomials with small rational coefficients."""
    coords = _coords(space, max_order, base)
    out: dict = {}
    for _ in range(rng.randint(1, terms)):
        powers: dict = {}
        for _ in range(rng.randint(0 if constant else 1, max_degree)):
            c = rng.choice(coords)
            powers[c] = powers.get(c, 0) + 1
        p = JetPoly.from_monomial(powers, random_coeff(rng))
        for mono, c in p.terms.items():
            out[mono] = out.get(mono, 0) + c
    return JetPoly(out)


def random_nonzero_poly(rng: random.Random, space: JetSpace, **kw) -> JetPoly:
    while True:
        p = random_poly(rng, space, **kw)
        if p:
            return p


def random_word(
    rng: random.Random, space: JetSpace, contact: int, horizontal: int, max_order: int = 1
) -> tuple[Covector, ...]:
    if horizontal > space.n:
        raise ValueError("horizontal degree exceeds the base dimension")
    dxs = sorted(rng.sample(range(space.n), horizontal))
    oms = [Covector.omega(i, s) for i in range(space.m) for s in enumerate_multiindices(space.n, max_order)]
    if contact > len(oms):
        raise ValueError("not enough contact covectors for this contact degree")
    return tuple(Covector.dx(lam) for lam in dxs) + tuple(rng.sample(oms, contact))


def random_form(
    rng: random.Random,
    space: JetSpace,
    degree: int,
    contact: int | None = None,
    max_order: int = 1,
    terms: int = 3,
    poly_order: int | None = None,
    max_degree: int = 2,
) -> Form:
    """Random ``degree``-form; ``contact`` fixes the contact degree of every term."""
    poly_order = max_order if poly_order is None else poly_order
    n_om = space.m * len(list(enumerate_multiindices(space.n, max_order)))
    if degree > space.n + n_om:
        raise ValueError(f"no {degree}-forms with contact factors of order <= {max_order}")
    out: dict = {}
    for _ in range(rng.randint(1, terms)):
        if contact is None:
            p = rng.randint(max(0, degree - space.n), min(degree, n_om))
        else:
            p = contact
        word = random_word(rng, space, p, degree - p, max_order)
        out[word] = random_poly(rng, space, poly_order, max_degree, terms=2)
    return Form(degree, out)


def random_du_form(
    rng: random.Random, space: JetSpace, degree: int, max_order: int = 1, terms: int = 3
) -> Form:
    """Random form written in the ``(dx, du)`` basis, converted to the contact basis."""
    out: dict = {}
    dus = [Covector.du(i, s) for i in range(space.m) for s in enumerate_multiindices(space.n, max_order)]
    pool = [Covector.dx(lam) for lam in range(space.n)] + dus
    for _ in range(rng.randint(1, terms)):
        word = tuple(rng.sample(pool, degree))
        out[word] = random_poly(rng, space, max_order, 2, terms=2)
    return from_du_basis(out, degree)


def random_section(rng: random.Random, space: JetSpace, max_degree: int = 3) -> PolySection:
    comps = []
    for _ in range(space.m):
        out: dict = {}
        for _ in range(rng.randint(1, 3)):
            powers: dict = {}
            for _ in range(rng.randint(0, max_degree)):
                c = JetCoord.base(rng.randrange(space.n))
                powers[c] = powers.get(c, 0) + 1
            p = JetPoly.from_monomial(powers, random_coeff(rng))
            for mono, c in p.terms.items():
                out[mono] = out.get(mono, 0) + c
        comps.append(JetPoly(out))
    return PolySection(space, comps)


def random_operator(
    rng: random.Random,
    space: JetSpace,
    rows: int | None = None,
    cols: int | None = None,
    max_order: int = 2,
    coeff_order: int = 1,
    terms: int = 2,
) -> CDiffOp:
    rows = space.m if rows is None else rows
    cols = space.m if cols is None else cols
    entries: dict = {}
    for a in range(rows):
        for b in range(cols):
            cell = {}
            for _ in range(rng.randint(0, terms)):
                sigma = random_multiindex(rng, space.n, max_order)
                cell[sigma] = random_poly(rng, space, coeff_order, 2, terms=2)
            entries[(a, b)] = cell
    return CDiffOp(rows, cols, space.n, entries)


def random_space(rng: random.Random, max_n: int = 2, max_m: int = 2) -> JetSpace:
    return JetSpace(rng.randint(1, max_n), rng.randint(1, max_m))
