"""
Adjoint operators and Green's formula
=====================================

Operators in total derivatives, sum a^s D_s, form a ring.  The formal adjoint
moves every D_s across by parts, and the price is a total divergence.
"""

from jetvar import JetSpace, render
from jetvar.cdiff import CDiffOp, adjoint, apply, compose, green_remainder
from jetvar.parser import parse_operator, parse_poly
from jetvar.variational import euler_lagrange

S = JetSpace(1, 1)

op = parse_operator("u*D[x]", S)
print("op              =", render.text(op, S))
print("op*             =", render.text(adjoint(op), S))
print("op** == op:", adjoint(adjoint(op)) == op)

# composition expands with the Leibniz rule, so D_x u = u D_x + u_x
Dx = parse_operator("D[x]", S)
u = parse_poly("u", S)
print("D_x o u         =", render.text(compose(Dx, CDiffOp.scalar(u, 1)), S))

# q op(p) - op*(q) p is a divergence; green_remainder also builds the current
p, q = parse_poly("u[x]", S), parse_poly("x*u", S)
g = green_remainder(op, [p], [q])
print("remainder       =", render.text(g.remainder, S))
print("current         =", render.text(g.current_form(), S))
print("D_x current == remainder:", g.divergence() == g.remainder)
print("EL(remainder) is zero:", euler_lagrange(g.remainder, S).is_zero())

# a 2 x 2 example with two independent variables
T = JetSpace(2, 2)
M = parse_operator("[[D[x1x1], u1*D[x2]], [0, u2]]", T)
print("M  =", render.text(M, T))
print("M* =", render.text(adjoint(M), T))
phi = [parse_poly("u1*u2", T), parse_poly("x1", T)]
print("M(phi) =", [render.text(f, T) for f in apply(M, phi)])
