"""Euler-Lagrange, Helmholtz and source-form maps of the variational sequence.

Classes of forms are always handled through canonical representatives:
source forms ``eta_i om^i ^ Vol`` at contact degree one and skew-adjoint
C-differential operators at contact degree two.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Mapping, Sequence

from .cdiff import CDiffOp, adjoint, compose, linearization
from .forms import DX, OMEGA, Covector, Form, as_form, contact_differential
from .jetring import FIBRE, JetPoly, JetSpace, fibre_degree
from .multiindex import MultiIndex, choose, enumerate_multiindices


class NotVariationalError(ArithmeticError):
    """Raised when a source form fails the Helmholtz conditions.

    ``witness`` holds the non-zero Helmholtz operator.
    """

    def __init__(self, witness: CDiffOp, message: str = "source form is not locally variational"):
        super().__init__(message)
        self.witness = witness


def _vol_sign(n: int) -> int:
    # om ^ Vol = (-1)^n Vol ^ om, and forms store dx factors first
    return -1 if n & 1 else 1


class SourceForm:
    """``sum_i eta_i om^i ^ Vol`` on a jet space with ``m`` fibre coordinates."""

    __slots__ = ("space", "components")

    def __init__(self, space: JetSpace, components: Sequence):
        comps = tuple(JetPoly.coerce(c) for c in components)
        if len(comps) != space.m:
            raise ValueError(f"expected {space.m} components, got {len(comps)}")
        self.space = space
        self.components = comps

    @classmethod
    def zero(cls, space: JetSpace) -> "SourceForm":
        return cls(space, [0] * space.m)

    def is_zero(self) -> bool:
        return not any(self.components)

    def __bool__(self):
        return not self.is_zero()

    def __eq__(self, other):
        if not isinstance(other, SourceForm):
            return NotImplemented
        return self.space == other.space and self.components == other.components

    def __hash__(self):
        return hash((self.space, self.components))

    def __add__(self, other: "SourceForm") -> "SourceForm":
        return SourceForm(self.space, [a + b for a, b in zip(self.components, other.components)])

    def __sub__(self, other: "SourceForm") -> "SourceForm":
        return SourceForm(self.space, [a - b for a, b in zip(self.components, other.components)])

    def order(self) -> int:
        return max((c.order() for c in self.components), default=0)

    def to_form(self) -> Form:
        n = self.space.n
        vol = tuple(Covector.dx(k) for k in range(n))
        sign = _vol_sign(n)
        terms = {
            vol + (Covector.omega(i, MultiIndex.empty(n)),): eta * sign
            for i, eta in enumerate(self.components)
        }
        return Form(n + 1, terms)

    def __repr__(self):
        from .render import vector_text

        return f"SourceForm({vector_text(self.components, self.space)!r})"

    def to_json(self) -> dict:
        return {"components": [c.to_json() for c in self.components]}

    @classmethod
    def from_json(cls, space: JetSpace, data: Mapping) -> "SourceForm":
        return cls(space, [JetPoly.from_json(c) for c in data["components"]])


def lagrangian_form(L, n: int) -> Form:
    """``L dx^1 ^ ... ^ dx^n``."""
    return Form(n, {tuple(Covector.dx(k) for k in range(n)): JetPoly.coerce(L)})


def _density(L, space: JetSpace) -> JetPoly:
    if isinstance(L, Form):
        p, q = L.bidegree() if L else (0, space.n)
        if (p, q) != (0, space.n):
            raise ValueError(f"a Lagrangian is a (0, {space.n}) form, got bidegree ({p}, {q})")
        return L.coefficient(tuple(Covector.dx(k) for k in range(space.n)))
    return JetPoly.coerce(L)


def euler_lagrange(L, space: JetSpace) -> SourceForm:
    """``E_i(L) = sum_sigma (-1)^|sigma| D_sigma dL/du^i_sigma``.

    ``L`` may be a density or the horizontal top form ``L Vol``.
    """
    L = _density(L, space)
    eta = [JetPoly.zero() for _ in range(space.m)]
    for v in L.variables():
        if v.kind != FIBRE:
            continue
        term = L.partial(v).total_derivative_multi(v.sigma)
        eta[v.index] = eta[v.index] - term if v.sigma.order() & 1 else eta[v.index] + term
    return SourceForm(space, eta)


def source_representative(a: Form, space: JetSpace) -> SourceForm:
    """Canonical representative of a ``(1, n)`` form: integrate every ``om_sigma`` by parts."""
    a = as_form(a)
    n = space.n
    eta = [JetPoly.zero() for _ in range(space.m)]
    if not a:
        return SourceForm(space, eta)
    if a.bidegree() != (1, n):
        raise ValueError(f"expected a form of bidegree (1, {n}), got {a.bidegree()}")
    sign = _vol_sign(n)
    for word, coeff in a.terms.items():
        om = word[-1]
        term = (coeff * sign).total_derivative_multi(om.sigma)
        eta[om.index] = eta[om.index] - term if om.sigma.order() & 1 else eta[om.index] + term
    return SourceForm(space, eta)


def _as_source(eta, space: JetSpace | None) -> SourceForm:
    if isinstance(eta, SourceForm):
        return eta
    if space is None:
        raise ValueError("a jet space is needed to read bare components")
    if isinstance(eta, (JetPoly, int, Fraction)):
        eta = [eta]
    return SourceForm(space, eta)


def helmholtz(eta, space: JetSpace | None = None) -> CDiffOp:
    """Helmholtz operator ``(l_eta - l_eta^*) / 2``; zero iff ``eta`` is locally variational."""
    eta = _as_source(eta, space)
    ell = linearization(eta.components, eta.space)
    return (ell - adjoint(ell)).scale(Fraction(1, 2))


def _two_form_tables(a: Form, n: int) -> list[tuple[int, MultiIndex, int, MultiIndex, JetPoly]]:
    """Read a ``(2, n)`` form as ``sum c om^a_sigma ^ om^b_tau ^ Vol``."""
    out = []
    for word, coeff in a.terms.items():
        if [c.kind for c in word] != [DX] * n + [OMEGA, OMEGA]:
            raise ValueError("expected a form of bidegree (2, n)")
        first, second = word[n], word[n + 1]
        # Vol ^ om ^ om = om ^ om ^ Vol, since moving a 2-form is sign-free
        out.append((first.index, first.sigma, second.index, second.sigma, coeff))
    return out


def helmholtz_coefficients(eta, space: JetSpace | None = None, bound: int | None = None) -> CDiffOp:
    """Helmholtz operator from the explicit coefficient formula.

    The two-form ``Cd(eta om ^ Vol)`` is written as
    ``alpha_{ij}^sigma om^i_sigma ^ om^j ^ Vol`` and the operator entries are

        nabla_{ji}^sigma = 1/2 (alpha_{ij}^sigma
            - sum_rho (-1)^|sigma+rho| choose(sigma+rho, rho) D_rho alpha_{ji}^{sigma+rho})

    with ``|rho| <= bound - |sigma|``.  ``bound`` defaults to the order of
    ``eta``, which covers every non-zero ``alpha``.
    """
    eta = _as_source(eta, space)
    space = eta.space
    n, m = space.n, space.m
    two = contact_differential(eta.to_form(), n)
    alpha: dict[tuple[int, int], dict[MultiIndex, JetPoly]] = {}
    for a, sa, b, sb, c in _two_form_tables(two, n) if two else []:
        if sb.is_empty():
            i, j, sigma, val = a, b, sa, c
        elif sa.is_empty():
            i, j, sigma, val = b, a, sb, -c
        else:
            raise ValueError("coefficient formula needs one order-zero contact factor per term")
        cell = alpha.setdefault((i, j), {})
        cell[sigma] = cell[sigma] + val if sigma in cell else val
    s = eta.order() if bound is None else bound
    half = Fraction(1, 2)
    entries: dict = {}
    for i in range(m):
        for j in range(m):
            cell: dict[MultiIndex, JetPoly] = {}
            for sigma in enumerate_multiindices(n, s):
                val = alpha.get((i, j), {}).get(sigma, JetPoly.zero())
                for rho in enumerate_multiindices(n, s - sigma.order()):
                    kappa = sigma.union(rho)
                    other = alpha.get((j, i), {}).get(kappa)
                    if not other:
                        continue
                    term = other.total_derivative_multi(rho) * choose(kappa, rho)
                    val = val + term if kappa.order() & 1 else val - term
                if val:
                    cell[sigma] = val * half
            if cell:
                entries[(j, i)] = cell
    return CDiffOp(m, m, n, entries)


def skew_representative(a: Form, space: JetSpace) -> CDiffOp:
    """Canonical skew-adjoint operator of a ``(2, n)`` form.

    A term ``c om^a_sigma ^ om^b_tau ^ Vol`` contributes
    ``(-1)^|tau| D_tau o c D_sigma`` to entry ``(b, a)`` of ``M``; the result
    is ``(M - M^*) / 2``.
    """
    a = as_form(a)
    n, m = space.n, space.m
    M = CDiffOp.zero(m, m, n)
    if not a:
        return M
    for ia, sa, ib, sb, c in _two_form_tables(a, n):
        inner = CDiffOp(m, m, n, {(ib, ia): {sa: c}})
        if sb.is_empty():
            M = M + inner
            continue
        outer = CDiffOp(m, m, n, {(ib, ib): {sb: -1 if sb.order() & 1 else 1}})
        M = M + compose(outer, inner)
    return (M - adjoint(M)).scale(Fraction(1, 2))


def e1(a: Form, space: JetSpace):
    """First-page differential on canonical representatives.

    Contact degree 0 (a Lagrangian ``L Vol``) gives its Euler-Lagrange
    :class:`SourceForm`; contact degree 1 gives the skew-adjoint operator of
    ``Cd a``, which for a source form is its Helmholtz operator.
    """
    a = as_form(a)
    n = space.n
    if not a:
        if a.degree == n:
            return SourceForm.zero(space)
        if a.degree == n + 1:
            return CDiffOp.zero(space.m, space.m, n)
        raise ValueError(f"expected degree {n} or {n + 1}, got {a.degree}")
    p, q = a.bidegree()
    if q != n:
        raise ValueError(f"expected horizontal degree {n}, got {q}")
    if p == 0:
        return euler_lagrange(a, space)
    if p == 1:
        return skew_representative(contact_differential(a, n), space)
    raise ValueError("canonical representatives are implemented for contact degree <= 1 input")


def is_variationally_trivial(L, space: JetSpace) -> bool:
    return euler_lagrange(L, space).is_zero()


def is_locally_variational(eta, space: JetSpace | None = None) -> bool:
    return helmholtz(eta, space).is_zero()


def tonti_lagrangian(eta, space: JetSpace | None = None) -> JetPoly:
    """Lagrangian ``L = sum_i u^i int_0^1 eta_i(x, t u) dt`` of a variational source form.

    Raises :class:`NotVariationalError` carrying the Helmholtz operator when
    the source form is not locally variational.
    """
    eta = _as_source(eta, space)
    witness = helmholtz(eta)
    if witness:
        raise NotVariationalError(witness)
    L = JetPoly.zero()
    for i, comp in enumerate(eta.components):
        scaled = JetPoly({mono: Fraction(c) / (fibre_degree(mono) + 1) for mono, c in comp.terms.items()})
        L = L + eta.space.u(i) * scaled
    return L
