"""
Euler-Lagrange expressions of polynomial Lagrangians
====================================================

Start from a Lagrangian density, compute its Euler-Lagrange expressions and
check that they survive a round trip through the Tonti reconstruction.
"""

from fractions import Fraction

from jetvar import JetSpace, euler_lagrange, helmholtz, render, tonti_lagrangian
from jetvar.parser import parse_poly

# one independent variable x, one dependent variable u
S = JetSpace(1, 1)

# the string energy 1/2 u_x^2
L = parse_poly("1/2*u[x]^2", S)
eta = euler_lagrange(L, S)
print("L   =", render.text(L, S))
print("EL  =", render.text(eta, S))

# an Euler-Lagrange expression always passes the Helmholtz test
print("H(EL) is zero:", helmholtz(eta).is_zero())

# Tonti's formula gives back a Lagrangian for it; not the same one, but one
# that differs from L by a total derivative
L2 = tonti_lagrangian(eta)
print("Tonti Lagrangian =", render.text(L2, S))
print("EL(Tonti) == EL:", euler_lagrange(L2, S) == eta)
print("difference is a null Lagrangian:", euler_lagrange(L2 - L, S).is_zero())

# two independent variables: the wave equation from 1/2 u_t^2 - 1/2 u_x^2,
# with x1 playing the role of t
W = JetSpace(2, 1)
wave = Fraction(1, 2) * W.u(0, (0, 1)) ** 2 - Fraction(1, 2) * W.u(0, (1, 0)) ** 2
print("wave EL =", render.text(euler_lagrange(wave, W), W))

# and the same result in LaTeX
print("LaTeX:", render.latex(euler_lagrange(wave, W), W))
