import random
from fractions import Fraction

import pytest

from jetvar.cdiff import CDiffOp, adjoint, linearization
from jetvar.forms import Covector, Form, contact_differential, d, dbar, horizontalize
from jetvar.jetring import JetPoly, JetSpace
from jetvar.multiindex import MultiIndex
from jetvar.sampling import random_form, random_poly, random_space
from jetvar.variational import (
    NotVariationalError,
    SourceForm,
    e1,
    euler_lagrange,
    helmholtz,
    helmholtz_coefficients,
    is_locally_variational,
    is_variationally_trivial,
    lagrangian_form,
    skew_representative,
    source_representative,
    tonti_lagrangian,
)

S = JetSpace(1, 1)
E, X, XX = MultiIndex((0,)), MultiIndex((1,)), MultiIndex((2,))
x, u, ux, uxx, uxxx = S.x(0), S.u(0), S.u(0, X), S.u(0, XX), S.u(0, MultiIndex((3,)))
Dx = CDiffOp.total(X)
half = Fraction(1, 2)


def src(*components, space=S):
    return SourceForm(space, list(components))


# -- Euler-Lagrange -----------------------------------------------------------


def test_euler_lagrange_examples():
    assert euler_lagrange(half * ux * ux, S) == src(-uxx)
    assert euler_lagrange((u * u * x).total_derivative(0), S) == src(0)
    W = JetSpace(2, 1)
    ut, uxw = W.u(0, (0, 1)), W.u(0, (1, 0))
    assert euler_lagrange(half * ut * ut - half * uxw * uxw, W) == src(-W.u(0, (0, 2)) + W.u(0, (2, 0)), space=W)


def test_euler_lagrange_accepts_top_form():
    L = half * ux * ux
    assert euler_lagrange(lagrangian_form(L, 1), S) == euler_lagrange(L, S)
    with pytest.raises(ValueError):
        euler_lagrange(Form.omega(0, E), S)


def test_euler_lagrange_is_adjoint_linearization_at_one():
    rng = random.Random(51)
    for _ in range(50):
        T = random_space(rng)
        L = random_poly(rng, T)
        expected = adjoint(linearization([L], T))([JetPoly.constant(1)])
        assert euler_lagrange(L, T).components == expected


def test_euler_lagrange_order_bound():
    rng = random.Random(52)
    for _ in range(30):
        T = random_space(rng)
        L = random_poly(rng, T)
        assert euler_lagrange(L, T).order() <= 2 * L.order()


def test_total_divergences_are_trivial():
    rng = random.Random(53)
    for _ in range(40):
        T = random_space(rng)
        fs = [random_poly(rng, T) for _ in range(T.n)]
        div = sum((f.total_derivative(lam) for lam, f in enumerate(fs)), JetPoly.zero())
        assert is_variationally_trivial(div, T)
    assert is_variationally_trivial((u * u).total_derivative(0), S)
    assert not is_variationally_trivial(u * u, S)


# -- source forms -------------------------------------------------------------


def test_source_form_basics():
    eta = src(u * ux)
    assert eta.to_form() == Form(2, {(Covector.dx(0), Covector.omega(0, E)): -u * ux})
    assert source_representative(eta.to_form(), S) == eta
    assert SourceForm.from_json(S, eta.to_json()) == eta
    assert (eta - eta).is_zero() and SourceForm.zero(S) == src(0)
    assert (eta + eta) == src(2 * u * ux)


def test_source_representative_examples():
    a = Form(2, {(Covector.dx(0), Covector.omega(0, X)): -uxx})  # u_xx om_x ^ Vol
    assert source_representative(a, S) == src(-uxxx)
    with pytest.raises(ValueError):
        source_representative(Form.dx(0), S)


def test_source_representative_kills_dbar_exact():
    rng = random.Random(54)
    for _ in range(40):
        T = random_space(rng)
        beta = random_form(rng, T, T.n, contact=1, max_order=2)
        assert source_representative(dbar(beta, p=1, n=T.n), T).is_zero()


def test_representative_invariance():
    rng = random.Random(55)
    for _ in range(40):
        T = random_space(rng)
        alpha = random_form(rng, T, T.n + 1, contact=1, max_order=2)
        beta = random_form(rng, T, T.n, contact=1, max_order=2)
        shifted = alpha + dbar(beta, p=1, n=T.n)
        assert source_representative(shifted, T) == source_representative(alpha, T)


# -- Helmholtz ----------------------------------------------------------------


def test_helmholtz_examples():
    H = helmholtz(src(u * ux))
    assert H == u * Dx + CDiffOp.scalar(half * ux, 1)
    ell = linearization([u * ux], S)
    assert (ell - adjoint(ell))([u]) == (ux * u + 2 * u * ux,)
    assert not helmholtz(src(uxx))
    assert not helmholtz(src(-uxx))
    assert not is_locally_variational(src(u * ux))
    assert is_locally_variational(src(-uxx))


def test_helmholtz_of_euler_lagrange_vanishes():
    rng = random.Random(56)
    for _ in range(40):
        T = random_space(rng)
        assert not helmholtz(euler_lagrange(random_poly(rng, T), T))


def test_helmholtz_is_skew_adjoint():
    rng = random.Random(57)
    for _ in range(30):
        T = random_space(rng)
        H = helmholtz([random_poly(rng, T, 3) for _ in range(T.m)], T)
        assert adjoint(H) == -H


def test_helmholtz_routes_agree():
    rng = random.Random(58)
    for _ in range(40):
        T = random_space(rng)
        eta = [random_poly(rng, T, 3) for _ in range(T.m)]
        H = helmholtz(eta, T)
        assert helmholtz_coefficients(eta, T) == H
        two = contact_differential(SourceForm(T, eta).to_form(), T.n)
        assert skew_representative(two, T) == H


def test_helmholtz_bound_reading():
    # bounding |rho| by the jet order of the coefficient drops the tau != 0 terms
    eta = src(u * uxx)
    expected = -(ux * Dx) - CDiffOp.scalar(half * uxx, 1)
    assert helmholtz(eta) == expected
    assert helmholtz_coefficients(eta) == expected
    assert helmholtz_coefficients(eta, bound=0) != expected


def test_skew_representative_rejects_wrong_shape():
    with pytest.raises(ValueError):
        skew_representative(Form(2, {(Covector.dx(0), Covector.omega(0, E)): u}), S)


# -- e1 -------------------------------------------------------------------------


def test_e1_on_lagrangians():
    rng = random.Random(59)
    for _ in range(30):
        T = random_space(rng)
        L = random_poly(rng, T)
        assert e1(lagrangian_form(L, T.n), T) == euler_lagrange(L, T)


def test_e1_on_source_forms_is_helmholtz():
    rng = random.Random(60)
    for _ in range(30):
        T = random_space(rng)
        eta = SourceForm(T, [random_poly(rng, T) for _ in range(T.m)])
        assert e1(eta.to_form(), T) == helmholtz(eta)


def test_e1_squared_vanishes():
    rng = random.Random(61)
    for _ in range(30):
        T = random_space(rng)
        eta = e1(lagrangian_form(random_poly(rng, T), T.n), T)
        assert not e1(eta.to_form(), T)


def test_e1_kills_dbar_exact():
    rng = random.Random(62)
    for _ in range(30):
        T = random_space(rng)
        p = rng.randint(0, 1)
        beta = random_form(rng, T, T.n - 1 + p, contact=p, max_order=2)
        assert not e1(dbar(beta, p=p, n=T.n), T)


def test_e1_rejects_bad_bidegree():
    with pytest.raises(ValueError):
        e1(Form.omega(0, E), S)
    assert e1(Form.zero(1), S) == SourceForm.zero(S)


# -- Tonti ----------------------------------------------------------------------


def test_tonti_examples():
    assert tonti_lagrangian(src(-uxx)) == -half * u * uxx
    assert euler_lagrange(-half * u * uxx, S) == src(-uxx)
    assert tonti_lagrangian(src(0)) == 0
    assert tonti_lagrangian(src(u)) == half * u * u


def test_tonti_rejects_non_variational():
    with pytest.raises(NotVariationalError) as info:
        tonti_lagrangian(src(u * ux))
    assert info.value.witness == helmholtz(src(u * ux))


def test_tonti_round_trip():
    rng = random.Random(63)
    for _ in range(30):
        T = random_space(rng)
        eta = euler_lagrange(random_poly(rng, T), T)
        assert euler_lagrange(tonti_lagrangian(eta), T) == eta


def test_tonti_differs_from_original_by_a_divergence():
    rng = random.Random(64)
    for _ in range(20):
        T = random_space(rng)
        L = random_poly(rng, T)
        diff = tonti_lagrangian(euler_lagrange(L, T)) - L
        assert is_variationally_trivial(diff, T)


def test_variational_sequence_via_forms():
    # h(d(L Vol)) vanishes; the contact part of d(L Vol) carries EL after integration by parts
    rng = random.Random(65)
    for _ in range(20):
        T = random_space(rng)
        L = random_poly(rng, T)
        top = d(lagrangian_form(L, T.n), T.n)
        assert not horizontalize(top)
        assert source_representative(top, T) == euler_lagrange(L, T)
