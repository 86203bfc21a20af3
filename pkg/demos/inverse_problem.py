"""
Which source forms come from a Lagrangian?
==========================================

The Helmholtz operator H(eta) = (l_eta - l_eta^*)/2 vanishes exactly for the
locally variational source forms.  When it does, a Lagrangian is rebuilt by
fibre scaling; when it does not, the operator itself is the witness.
"""

from jetvar import JetSpace, NotVariationalError, helmholtz, helmholtz_coefficients, render, tonti_lagrangian
from jetvar.cdiff import adjoint, linearization
from jetvar.parser import parse_vector
from jetvar.variational import SourceForm

S = JetSpace(1, 1)

candidates = ["-u[xx]", "u*u[x]", "u[xxxx] + u^3", "u*u[xx]", "u[x]^2 + 2*u*u[xx]"]

for text in candidates:
    eta = SourceForm(S, parse_vector(text, S))
    H = helmholtz(eta)
    # the literal coefficient formula is an independent route to the same operator
    assert H == helmholtz_coefficients(eta)
    print(f"eta = {text}")
    if H.is_zero():
        print("   variational, L =", render.text(tonti_lagrangian(eta), S))
    else:
        print("   not variational, H =", render.text(H, S))

# the Helmholtz operator is always skew-adjoint
eta = SourceForm(S, parse_vector("u*u[x]", S))
H = helmholtz(eta)
print("H* == -H:", adjoint(H) == -H)

# and it is built from the linearization of eta
ell = linearization(eta.components, S)
print("l_eta   =", render.text(ell, S))
print("l_eta^* =", render.text(adjoint(ell), S))

# asking for a Lagrangian anyway raises with the witness attached
try:
    tonti_lagrangian(eta)
except NotVariationalError as exc:
    print("rejected; witness =", render.text(exc.witness, S))

# systems work the same way: two fields coupled through u1 u2
T = JetSpace(1, 2)
eta2 = SourceForm(T, parse_vector("[u2, u1]", T))
print("coupled system:", render.text(tonti_lagrangian(eta2), T))
