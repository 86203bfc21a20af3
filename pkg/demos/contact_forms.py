"""
Contact forms, horizontalization and the contact homotopy
=========================================================

Forms are kept in the basis {dx, om}, where om^i_s = du^i_s - u^i_{s x} dx.
This walk-through splits forms into contact and horizontal parts, takes the
horizontal differential and rebuilds primitives of closed contact forms.
"""

from jetvar import JetSpace, forms, render
from jetvar.parser import parse_form

S = JetSpace(1, 1)

# du is not horizontal: in the contact basis it picks up a u_x dx term
du = parse_form("du", S)
print("du       =", render.text(du, S))
print("h(du)    =", render.text(forms.horizontalize(du), S))
print("v(du)    =", render.text(forms.vertical(du), S))

# d squares to zero, and d(u dx) is a pure contact form
a = parse_form("u*dx", S)
print("d(u dx)  =", render.text(forms.d(a, 1), S))
print("d d(u dx) is zero:", not forms.d(forms.d(a, 1), 1))

# dbar keeps the contact degree; on u du it differs from dhat, which keeps
# only the part of d raising horizontal degree on the full form
b = parse_form("u*du", S)
print("u du            =", render.text(b, S))
print("dbar(u du), p=0 =", render.text(forms.dbar(b, p=0, n=1), S))
print("dhat(u du)      =", render.text(forms.dhat(b, 1), S))

# the contact homotopy operator inverts d on contact forms
c = parse_form("om & dx", S)
print("A(om^dx) =", render.text(forms.contact_homotopy(c), S))
print("A d + d A == id:", forms.contact_homotopy(forms.d(c, 1)) + forms.d(forms.contact_homotopy(c), 1) == c)

# with two independent variables, a closed 1-contact 2-form has a 1-contact
# primitive; A alone returns a form with a horizontal part that is then removed
T = JetSpace(2, 1)
gamma = parse_form("u[x2]*om", T)
alpha = forms.d(gamma, 2)
theta = forms.contact_primitive(alpha, 1, 2)
print("alpha         =", render.text(alpha, T))
print("A(alpha)      =", render.text(forms.contact_homotopy(alpha), T))
print("primitive     =", render.text(theta, T))
print("d(primitive) == alpha:", forms.d(theta, 2) == alpha)
