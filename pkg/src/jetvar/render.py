"""Text and LaTeX rendering.

The text form is the input grammar of :mod:`jetvar.parser`, so rendering a
canonical value and parsing it back returns the same value.  Output is
deterministic: terms follow the canonical graded-lex order.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Sequence

from .jetring import BASE, JetCoord, JetPoly, JetSpace, coord_key
from .multiindex import MultiIndex

WEDGE = "∧"


class _Names:
    def __init__(self, space: JetSpace | None):
        self.space = space

    def base(self, lam: int) -> str:
        if self.space is not None:
            return self.space.base_names[lam]
        return f"x{lam + 1}"

    def fibre(self, i: int) -> str:
        if self.space is not None:
            return self.space.fibre_names[i]
        return f"u{i + 1}"

    def omega(self, i: int) -> str:
        if self.space is not None and self.space.m == 1:
            return "om"
        return f"om{i + 1}"

    def word(self, sigma: MultiIndex) -> str:
        return "".join(self.base(lam) for lam in sigma.word())


def _coeff_text(c) -> str:
    c = Fraction(c)
    return str(c.numerator) if c.denominator == 1 else f"{c.numerator}/{c.denominator}"


def coord_text(c: JetCoord, space: JetSpace | None = None) -> str:
    names = _Names(space)
    if c.kind == BASE:
        return names.base(c.index)
    base = names.fibre(c.index)
    if c.sigma.is_empty():
        return base
    return f"{base}[{names.word(c.sigma)}]"


def mono_text(mono: tuple, space: JetSpace | None = None) -> str:
    parts = []
    for c, p in mono:
        s = coord_text(c, space)
        parts.append(s if p == 1 else f"{s}^{p}")
    return "*".join(parts)


def poly_text(f: JetPoly, space: JetSpace | None = None) -> str:
    if not f:
        return "0"
    out = []
    for k, (mono, c) in enumerate(f.sorted_terms()):
        neg = c < 0
        mag = -c if neg else c
        if not mono:
            body = _coeff_text(mag)
        elif mag == 1:
            body = mono_text(mono, space)
        else:
            body = f"{_coeff_text(mag)}*{mono_text(mono, space)}"
        if k == 0:
            out.append(f"-{body}" if neg else body)
        else:
            out.append(f" - {body}" if neg else f" + {body}")
    return "".join(out)


def _factor_text(f: JetPoly, space) -> tuple[str, bool]:
    """Text of a coefficient used as a factor, and whether it is just a sign."""
    if len(f.terms) == 1:
        ((mono, c),) = f.terms.items()
        if not mono and abs(c) == 1:
            return ("-" if c < 0 else ""), True
        return poly_text(f, space), False
    return f"({poly_text(f, space)})", False


def covector_text(cov, space: JetSpace | None = None) -> str:
    from .forms import DX

    names = _Names(space)
    if cov.kind == DX:
        return f"d{names.base(cov.index)}"
    s = names.omega(cov.index)
    if cov.sigma.is_empty():
        return s
    return f"{s}[{names.word(cov.sigma)}]"


def _join_terms(parts: Sequence[str]) -> str:
    out = []
    for k, p in enumerate(parts):
        if k == 0:
            out.append(p)
        elif p.startswith("-"):
            out.append(f" - {p[1:]}")
        else:
            out.append(f" + {p}")
    return "".join(out) if out else "0"


def form_text(a, space: JetSpace | None = None) -> str:
    parts = []
    for word, coeff in a.sorted_terms():
        if not word:
            parts.append(poly_text(coeff, space))
            continue
        w = WEDGE.join(covector_text(c, space) for c in word)
        f, is_sign = _factor_text(coeff, space)
        if is_sign:
            parts.append(f"{f}{w}")
        else:
            parts.append(f"{f}*{w}")
    return _join_terms(parts)


def _op_entry_text(entry: dict, space) -> str:
    names = _Names(space)
    parts = []
    for sigma in sorted(entry, reverse=True):
        coeff = entry[sigma]
        if sigma.is_empty():
            parts.append(poly_text(coeff, space) if len(coeff.terms) == 1 else f"({poly_text(coeff, space)})")
            continue
        op = f"D[{names.word(sigma)}]"
        f, is_sign = _factor_text(coeff, space)
        parts.append(f"{f}{op}" if is_sign else f"{f}*{op}")
    return _join_terms(parts)


def op_text(op, space: JetSpace | None = None) -> str:
    rows = []
    for a in range(op.rows):
        rows.append([_op_entry_text(op.entry(a, b), space) for b in range(op.cols)])
    if op.rows == 1 and op.cols == 1:
        return rows[0][0]
    return "[" + ", ".join("[" + ", ".join(r) + "]" for r in rows) + "]"


def vector_text(polys: Sequence[JetPoly], space: JetSpace | None = None) -> str:
    if len(polys) == 1:
        return poly_text(polys[0], space)
    return "[" + ", ".join(poly_text(p, space) for p in polys) + "]"


# -- LaTeX ---------------------------------------------------------------


def _latex_coeff(c: Fraction) -> str:
    c = Fraction(c)
    if c.denominator == 1:
        return str(c.numerator)
    return rf"\frac{{{c.numerator}}}{{{c.denominator}}}"


def _latex_sub(sigma: MultiIndex, space) -> str:
    names = _Names(space)
    return " ".join(names.base(lam) for lam in sigma.word())


def coord_latex(c: JetCoord, space: JetSpace | None = None) -> str:
    names = _Names(space)
    if c.kind == BASE:
        return names.base(c.index) if space is not None and space.n == 1 else f"x^{{{c.index + 1}}}"
    sup = "" if space is not None and space.m == 1 else f"^{{{c.index + 1}}}"
    if c.sigma.is_empty():
        return f"u{sup}"
    return f"u{sup}_{{{_latex_sub(c.sigma, space)}}}"


def poly_latex(f: JetPoly, space: JetSpace | None = None) -> str:
    if not f:
        return "0"
    out = []
    for k, (mono, c) in enumerate(f.sorted_terms()):
        neg = c < 0
        mag = -c if neg else c
        factors = []
        for v, p in mono:
            s = coord_latex(v, space)
            factors.append(s if p == 1 else f"{{{s}}}^{{{p}}}")
        body = " ".join(factors)
        if not mono:
            body = _latex_coeff(mag)
        elif mag != 1:
            body = f"{_latex_coeff(mag)} {body}"
        sign = "-" if neg else "+"
        out.append(("-" + body) if (k == 0 and neg) else body if k == 0 else f" {sign} {body}")
    return "".join(out)


def covector_latex(cov, space: JetSpace | None = None) -> str:
    from .forms import DX

    if cov.kind == DX:
        if space is not None and space.n == 1:
            return "dx"
        return f"dx^{{{cov.index + 1}}}"
    sup = "" if space is not None and space.m == 1 else f"^{{{cov.index + 1}}}"
    if cov.sigma.is_empty():
        return rf"\omega{sup}"
    return rf"\omega{sup}_{{{_latex_sub(cov.sigma, space)}}}"


def form_latex(a, space: JetSpace | None = None) -> str:
    parts = []
    for word, coeff in a.sorted_terms():
        w = r" \wedge ".join(covector_latex(c, space) for c in word)
        c = poly_latex(coeff, space)
        if not word:
            parts.append(c)
        elif c == "1":
            parts.append(w)
        elif c == "-1":
            parts.append("-" + w)
        elif len(coeff.terms) > 1:
            parts.append(rf"\left({c}\right) {w}")
        else:
            parts.append(f"{c} {w}")
    return _join_terms(parts)


def op_latex(op, space: JetSpace | None = None) -> str:
    def entry(e):
        parts = []
        for sigma in sorted(e, reverse=True):
            c = poly_latex(e[sigma], space)
            if len(e[sigma].terms) > 1:
                c = rf"\left({c}\right)"
            if sigma.is_empty():
                parts.append(c)
            else:
                d = f"D_{{{_latex_sub(sigma, space)}}}"
                parts.append(d if c == "1" else ("-" + d if c == "-1" else f"{c} {d}"))
        return _join_terms(parts)

    cells = [[entry(op.entry(a, b)) for b in range(op.cols)] for a in range(op.rows)]
    if op.rows == 1 and op.cols == 1:
        return cells[0][0]
    body = r" \\ ".join(" & ".join(r) for r in cells)
    return rf"\begin{{pmatrix}} {body} \end{{pmatrix}}"


# -- dispatch ------------------------------------------------------------


def text(value, space: JetSpace | None = None) -> str:
    """Text rendering of any engine value; parses back to the same value."""
    from .cdiff import CDiffOp
    from .forms import Form
    from .variational import SourceForm

    if isinstance(value, JetPoly):
        return poly_text(value, space)
    if isinstance(value, Form):
        return form_text(value, space)
    if isinstance(value, CDiffOp):
        return op_text(value, space)
    if isinstance(value, SourceForm):
        return vector_text(value.components, space)
    if isinstance(value, (tuple, list)):
        return vector_text(value, space)
    raise TypeError(f"cannot render {type(value).__name__}")


def latex(value, space: JetSpace | None = None) -> str:
    from .cdiff import CDiffOp
    from .forms import Form
    from .variational import SourceForm

    if isinstance(value, JetPoly):
        return poly_latex(value, space)
    if isinstance(value, Form):
        return form_latex(value, space)
    if isinstance(value, CDiffOp):
        return op_latex(value, space)
    if isinstance(value, SourceForm):
        vol = " \\wedge ".join(covector_latex(_dx(k), space) for k in range(value.space.n))
        parts = []
        for i, eta in enumerate(value.components):
            if not eta:
                continue
            om = covector_latex(_om(i, value.space.n), space)
            parts.append(rf"\left({poly_latex(eta, space)}\right) {om} \wedge {vol}")
        return _join_terms(parts)
    if isinstance(value, (tuple, list)):
        if len(value) == 1:
            return poly_latex(value[0], space)
        return r"\begin{pmatrix} " + r" \\ ".join(poly_latex(p, space) for p in value) + r" \end{pmatrix}"
    raise TypeError(f"cannot render {type(value).__name__}")


def _dx(k):
    from .forms import Covector

    return Covector.dx(k)


def _om(i, n):
    from .forms import Covector

    return Covector.omega(i, MultiIndex.empty(n))


def to_json(value) -> dict:
    """JSON document for a value, tagged with its type."""
    from .cdiff import CDiffOp
    from .forms import Form
    from .variational import SourceForm

    if isinstance(value, JetPoly):
        return {"type": "function", "value": value.to_json()}
    if isinstance(value, Form):
        return {"type": "form", "value": value.to_json()}
    if isinstance(value, CDiffOp):
        return {"type": "operator", "value": value.to_json()}
    if isinstance(value, SourceForm):
        return {"type": "source", "value": value.to_json()}
    if isinstance(value, (tuple, list)):
        return {"type": "vector", "value": [p.to_json() for p in value]}
    raise TypeError(f"cannot serialize {type(value).__name__}")


def from_json(data: dict, space: JetSpace):
    from .cdiff import CDiffOp
    from .forms import Form
    from .variational import SourceForm

    kind, value = data["type"], data["value"]
    if kind == "function":
        return JetPoly.from_json(value)
    if kind == "form":
        return Form.from_json(value)
    if kind == "operator":
        return CDiffOp.from_json(value)
    if kind == "source":
        return SourceForm.from_json(space, value)
    if kind == "vector":
        return tuple(JetPoly.from_json(p) for p in value)
    raise ValueError(f"unknown value type {kind!r}")
