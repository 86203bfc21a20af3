"""Randomized property suites behind ``jetvar selftest``.

Each suite draws its cases from one seeded generator and reports how many
passed.  The suites are small versions of the checks in the test tree, meant
as a quick health check of an installation.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from typing import Callable

from . import forms, render
from .cdiff import adjoint, compose, green_remainder
from .forms import d
from .jetring import JetSpace
from .parser import evaluate
from .sampling import random_form, random_operator, random_poly, random_space
from .variational import SourceForm, euler_lagrange, helmholtz, helmholtz_coefficients, skew_representative, tonti_lagrangian


@dataclass(frozen=True)
class SuiteResult:
    name: str
    passed: int
    total: int

    @property
    def ok(self) -> bool:
        return self.passed == self.total


def _d_squared(rng, order):
    S = random_space(rng)
    a = random_form(rng, S, rng.randint(0, 2), max_order=min(order, 2))
    return not d(d(a, S.n), S.n)


def _commuting_derivatives(rng, order):
    S = JetSpace(2, rng.randint(1, 2))
    f = random_poly(rng, S, order)
    return f.total_derivative(0).total_derivative(1) == f.total_derivative(1).total_derivative(0)


def _splitting(rng, order):
    S = random_space(rng)
    a = random_form(rng, S, rng.randint(1, 3), max_order=1)
    h, v = forms.horizontalize(a), forms.vertical(a)
    return h + v == a and forms.horizontalize(h) == h and not forms.horizontalize(v)


def _homotopy(rng, order):
    S = random_space(rng)
    p = rng.randint(1, 2)
    a = random_form(rng, S, p + rng.randint(0, S.n), contact=p, max_order=1)
    return forms.contact_homotopy(d(a, S.n)) + d(forms.contact_homotopy(a), S.n) == a


def _helmholtz_of_el(rng, order):
    S = random_space(rng)
    L = random_poly(rng, S, min(order, 2))
    return not helmholtz(euler_lagrange(L, S))


def _tonti(rng, order):
    S = random_space(rng)
    eta = euler_lagrange(random_poly(rng, S, min(order, 2)), S)
    return euler_lagrange(tonti_lagrangian(eta), S) == eta


def _adjoint(rng, order):
    S = random_space(rng)
    A = random_operator(rng, S, max_order=min(order, 2))
    B = random_operator(rng, S, max_order=min(order, 2))
    return adjoint(adjoint(A)) == A and adjoint(compose(A, B)) == compose(adjoint(B), adjoint(A))


def _green(rng, order):
    S = random_space(rng)
    A = random_operator(rng, S, max_order=min(order, 2))
    p = [random_poly(rng, S, 1) for _ in range(S.m)]
    q = [random_poly(rng, S, 1) for _ in range(S.m)]
    g = green_remainder(A, p, q)
    return g.divergence() == g.remainder and g.certify(S)


def _helmholtz_routes(rng, order):
    S = random_space(rng)
    eta = [random_poly(rng, S, min(order, 3)) for _ in range(S.m)]
    H = helmholtz(eta, S)
    two = forms.contact_differential(SourceForm(S, eta).to_form(), S.n)
    R = skew_representative(two, S)
    return H == helmholtz_coefficients(eta, S) and R == H and adjoint(H) == -H


def _round_trip(rng, order):
    S = random_space(rng)
    kind = rng.randrange(3)
    if kind == 0:
        v = random_poly(rng, S, order)
    elif kind == 1:
        v = random_form(rng, S, rng.randint(1, 2), max_order=min(order, 2))
    else:
        v = random_operator(rng, S, max_order=min(order, 2))
    back = evaluate(render.text(v, S), S)
    if kind == 1 and not isinstance(back, forms.Form):
        back = forms.as_form(back)
    if kind == 2:
        from .cdiff import CDiffOp

        if not isinstance(back, CDiffOp):
            back = CDiffOp.scalar(back, S.n)
    return back == v or (not v and not back)


SUITES: dict[str, Callable] = {
    "d^2 = 0": _d_squared,
    "D_x D_y = D_y D_x": _commuting_derivatives,
    "h + v = id": _splitting,
    "homotopy identity": _homotopy,
    "Helmholtz of EL = 0": _helmholtz_of_el,
    "Tonti round trip": _tonti,
    "adjoint laws": _adjoint,
    "Green remainder": _green,
    "Helmholtz routes agree": _helmholtz_routes,
    "parse/render round trip": _round_trip,
}


def run_suites(seed: int = 0, cases: int = 20, max_order: int = 2) -> list[SuiteResult]:
    results = []
    for name, check in SUITES.items():
        rng = random.Random(f"{seed}:{name}")
        passed = sum(1 for _ in range(cases) if check(rng, max_order))
        results.append(SuiteResult(name, passed, cases))
    return results
