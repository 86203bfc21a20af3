"""Exact symbolic calculus on jet spaces: contact forms, C-differential
operators and the maps of the variational sequence."""

from .cdiff import (
    CDiffOp,
    EvolutionaryField,
    GreenRemainder,
    MultiOperator,
    adjoint,
    apply,
    compose,
    evo_apply,
    form_to_operator,
    green_remainder,
    linearization,
    operator_to_form,
)
from .forms import (
    Covector,
    Form,
    PrimitiveError,
    base_part,
    contact_differential,
    contact_homotopy,
    contact_part,
    contact_primitive,
    d,
    dbar,
    dhat,
    from_du_basis,
    horizontalize,
    is_p_contact,
    project,
    pullback_by_section,
    split,
    vertical,
    wedge,
)
from .jetring import JetCoord, JetPoly, JetSpace, PolySection, partial, prolong, pullback, total_derivative
from .multiindex import MultiIndex, choose, enumerate_multiindices, union
from .parser import ExprSyntaxError, ExprTypeError, ParseError, evaluate, parse
from .variational import (
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

__version__ = "0.1.0"
