"""Differential forms on jet spaces in the contact basis.

Every form is stored as a sum ``f * theta_1 ^ ... ^ theta_k`` where each
``theta`` is either a horizontal covector ``dx^lam`` or a contact form
``om^i_sigma = du^i_sigma - u^i_{sigma lam} dx^lam``.  Words are strictly
sorted (all ``dx`` before all ``om``; contact forms by ``(i, sigma)`` in
graded-lex order) and sign changes are folded into the coefficient.

Because the basis is adapted to the contact splitting, the projections onto
the summands with a fixed number of contact factors are term filters.  The
``du`` basis appears only at the input boundary (:func:`from_du_basis`).
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Mapping, NamedTuple, Sequence

from ._linalg import solve_sparse
from .jetring import FIBRE, JetCoord, JetPoly, PolySection, _sorted_mono, coord_key, fibre_degree, mono_mul
from .multiindex import MultiIndex

DX = 0
OMEGA = 1
DU = 2  # input only, never stored in a Form


class Covector(NamedTuple):
    kind: int
    index: int
    sigma: MultiIndex | None

    @classmethod
    def dx(cls, lam: int) -> "Covector":
        return cls(DX, lam, None)

    @classmethod
    def omega(cls, i: int, sigma: MultiIndex) -> "Covector":
        return cls(OMEGA, i, sigma)

    @classmethod
    def du(cls, i: int, sigma: MultiIndex) -> "Covector":
        return cls(DU, i, sigma)

    def order(self) -> int:
        return 0 if self.sigma is None else self.sigma.order()


@lru_cache(maxsize=None)
def covector_key(c: Covector):
    if c.kind == DX:
        return (DX, c.index, ())
    return (c.kind, c.index, c.sigma._key)


@lru_cache(maxsize=None)
def _shift_omega(c: Covector, lam: int) -> Covector:
    return Covector(OMEGA, c.index, c.sigma.add(lam))


@lru_cache(maxsize=None)
def _omega_coord(c: Covector) -> JetCoord:
    return JetCoord(FIBRE, c.index, c.sigma)


def sort_word(word: Sequence[Covector]) -> tuple[int, tuple[Covector, ...]]:
    """Sort a wedge word; returns ``(sign, sorted_word)`` with sign 0 on repeats."""
    keys = [covector_key(c) for c in word]
    if len(set(keys)) != len(keys):
        return 0, ()
    inversions = 0
    for a in range(len(keys)):
        ka = keys[a]
        for b in range(a + 1, len(keys)):
            if keys[b] < ka:
                inversions += 1
    order = sorted(range(len(word)), key=keys.__getitem__)
    return (-1 if inversions & 1 else 1), tuple(word[k] for k in order)


def _accumulate(out: dict, word: Sequence[Covector], coeff: JetPoly, sign: int = 1) -> None:
    s, w = sort_word(word)
    if not s or not coeff:
        return
    s *= sign
    prev = out.get(w)
    term = coeff if s > 0 else -coeff
    out[w] = term if prev is None else prev + term


def contact_degree(word: Sequence[Covector]) -> int:
    return sum(1 for c in word if c.kind == OMEGA)


class Form:
    """A homogeneous ``k``-form with :class:`JetPoly` coefficients.

    The zero form is accepted wherever a form of any degree is expected.
    """

    __slots__ = ("degree", "_terms")

    def __init__(self, degree: int, terms: Mapping[Sequence[Covector], JetPoly] | None = None):
        self.degree = degree
        out: dict = {}
        if terms:
            for word, coeff in terms.items():
                word = tuple(word)
                if len(word) != degree:
                    raise ValueError(f"word {word} does not have degree {degree}")
                if any(c.kind == DU for c in word):
                    raise ValueError("du covectors must go through from_du_basis")
                _accumulate(out, word, JetPoly.coerce(coeff))
        self._terms = {w: c for w, c in out.items() if c}

    @classmethod
    def _raw(cls, degree: int, terms: dict) -> "Form":
        obj = cls.__new__(cls)
        obj.degree = degree
        obj._terms = {w: c for w, c in terms.items() if c}
        return obj

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, degree: int = 0) -> "Form":
        return cls._raw(degree, {})

    @classmethod
    def function(cls, f) -> "Form":
        return cls._raw(0, {(): JetPoly.coerce(f)})

    @classmethod
    def dx(cls, lam: int) -> "Form":
        return cls._raw(1, {(Covector.dx(lam),): JetPoly.constant(1)})

    @classmethod
    def omega(cls, i: int, sigma: MultiIndex) -> "Form":
        return cls._raw(1, {(Covector.omega(i, sigma),): JetPoly.constant(1)})

    @classmethod
    def vol(cls, n: int) -> "Form":
        """``dx^1 ^ ... ^ dx^n``."""
        return cls._raw(n, {tuple(Covector.dx(lam) for lam in range(n)): JetPoly.constant(1)})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Mapping[tuple[Covector, ...], JetPoly]:
        return dict(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    def order(self) -> int:
        best = 0
        for word, coeff in self._terms.items():
            best = max(best, coeff.order(), max((c.order() for c in word if c.kind == OMEGA), default=0))
        return best

    def contact_degrees(self) -> set[int]:
        return {contact_degree(w) for w in self._terms}

    def bidegree(self) -> tuple[int, int]:
        """``(contact, horizontal)`` of a homogeneous form."""
        degs = self.contact_degrees()
        if len(degs) > 1:
            raise ValueError(f"form mixes contact degrees {sorted(degs)}")
        p = degs.pop() if degs else 0
        return p, self.degree - p

    def sorted_terms(self) -> list[tuple[tuple[Covector, ...], JetPoly]]:
        return sorted(self._terms.items(), key=lambda wc: [covector_key(c) for c in wc[0]])

    def coefficient(self, word: Sequence[Covector]) -> JetPoly:
        sign, w = sort_word(tuple(word))
        if not sign:
            return JetPoly.zero()
        c = self._terms.get(w, JetPoly.zero())
        return c if sign > 0 else -c

    # -- arithmetic -------------------------------------------------------

    def _check_degree(self, other: "Form") -> int:
        if self.degree == other.degree or not other._terms:
            return self.degree
        if not self._terms:
            return other.degree
        raise ValueError(f"cannot add forms of degree {self.degree} and {other.degree}")

    def __add__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        degree = self._check_degree(other)
        out = dict(self._terms)
        for w, c in other._terms.items():
            out[w] = out[w] + c if w in out else c
        return Form._raw(degree, out)

    def __neg__(self):
        return Form._raw(self.degree, {w: -c for w, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, Form):
            return NotImplemented
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, Form):
            return wedge(self, other)
        if isinstance(other, (JetPoly, int, Fraction)):
            f = JetPoly.coerce(other)
            return Form._raw(self.degree, {w: c * f for w, c in self._terms.items()})
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (JetPoly, int, Fraction)):
            return self * other
        return NotImplemented

    def __eq__(self, other):
        if isinstance(other, Form):
            if not self._terms and not other._terms:
                return True
            return self.degree == other.degree and self._terms == other._terms
        if isinstance(other, (int, JetPoly, Fraction)) and not other:
            return not self._terms
        return NotImplemented

    def __hash__(self):
        return hash((self.degree, frozenset(self._terms.items())))

    def __repr__(self):
        from .render import form_text

        return f"Form({form_text(self)!r})"

    def map_coefficients(self, fn) -> "Form":
        return Form._raw(self.degree, {w: fn(c) for w, c in self._terms.items()})

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for word, coeff in self.sorted_terms():
            covs = []
            for c in word:
                if c.kind == DX:
                    covs.append(["dx", c.index])
                else:
                    covs.append(["om", [c.index, list(c.sigma)]])
            terms.append({"covectors": covs, "coeff": coeff.to_json()})
        return {"degree": self.degree, "terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "Form":
        degree = int(data["degree"])
        out: dict = {}
        for term in data["terms"]:
            word = []
            for tag, val in term["covectors"]:
                if tag == "dx":
                    word.append(Covector.dx(int(val)))
                elif tag == "om":
                    i, counts = val
                    word.append(Covector.omega(int(i), MultiIndex(counts)))
                else:
                    raise ValueError(f"unknown covector tag {tag!r}")
            _accumulate(out, word, JetPoly.from_json(term["coeff"]))
        return cls._raw(degree, out)


def as_form(a) -> Form:
    if isinstance(a, Form):
        return a
    return Form.function(a)


# -- basis change --------------------------------------------------------


def from_du_basis(terms: Mapping[Sequence[Covector], object], degree: int | None = None) -> Form:
    """Rewrite a form given in the ``(dx, du)`` basis into the contact basis.

    Each ``du^i_sigma`` becomes ``om^i_sigma + u^i_{sigma lam} dx^lam``, so the
    coefficient order may rise by one.
    """
    out: dict = {}
    deg = degree
    for word, coeff in terms.items():
        word = tuple(word)
        if deg is None:
            deg = len(word)
        elif len(word) != deg:
            raise ValueError("mixed degrees in du-basis input")
        partial: list[tuple[tuple, JetPoly]] = [((), JetPoly.coerce(coeff))]
        for cov in word:
            if cov.kind == DX:
                options = [(cov, JetPoly.constant(1))]
            elif cov.kind == DU:
                options = [(Covector.omega(cov.index, cov.sigma), JetPoly.constant(1))]
                for lam in range(len(cov.sigma)):
                    coord = JetCoord.fibre(cov.index, cov.sigma.add(lam))
                    options.append((Covector.dx(lam), JetPoly.variable(coord)))
            else:
                options = [(cov, JetPoly.constant(1))]
            partial = [(w + (c,), f * g) for w, f in partial for c, g in options]
        for w, f in partial:
            _accumulate(out, w, f)
    return Form._raw(deg or 0, out)


# -- exterior algebra ----------------------------------------------------


def wedge(a: Form, b: Form) -> Form:
    a, b = as_form(a), as_form(b)
    out: dict = {}
    for wa, ca in a._terms.items():
        for wb, cb in b._terms.items():
            _accumulate(out, wa + wb, ca * cb)
    return Form._raw(a.degree + b.degree, out)


def _d_function(f: JetPoly, n: int) -> list[tuple[Covector, JetPoly]]:
    """``df = D_lam f dx^lam + df/du^i_sigma om^i_sigma``."""
    parts = []
    for lam in range(n):
        g = f.total_derivative(lam)
        if g:
            parts.append((Covector.dx(lam), g))
    for v in sorted(f.variables(), key=coord_key):
        if v.kind == FIBRE:
            g = f.partial(v)
            if g:
                parts.append((Covector.omega(v.index, v.sigma), g))
    return parts


def _infer_n(a: Form) -> int | None:
    for word, coeff in a._terms.items():
        for c in word:
            if c.sigma is not None:
                return len(c.sigma)
        for v in coeff.variables():
            if v.sigma is not None:
                return len(v.sigma)
    return None


def _need_n(a: Form, n: int | None) -> int:
    if n is not None:
        return n
    found = _infer_n(a)
    if found is None:
        # only base coordinates and dx's: n must be at least the largest index
        found = 1
        for word, coeff in a._terms.items():
            for c in word:
                found = max(found, c.index + 1)
            for v in coeff.variables():
                found = max(found, v.index + 1)
    return found


def d(a: Form, n: int | None = None) -> Form:
    """Exterior derivative, using ``d om^i_sigma = dx^lam ^ om^i_{sigma lam}``.

    ``n`` is inferred from the multi-indices when omitted; pass it for forms
    built only from base coordinates.
    """
    a = as_form(a)
    n = _need_n(a, n)
    out: dict = {}
    for word, coeff in a._terms.items():
        for cov, g in _d_function(coeff, n):
            _accumulate(out, (cov,) + word, g)
        for j, c in enumerate(word):
            if c.kind != OMEGA:
                continue
            sign = -1 if j & 1 else 1
            for lam in range(n):
                new = word[:j] + (Covector.dx(lam), _shift_omega(c, lam)) + word[j + 1:]
                _accumulate(out, new, coeff, sign)
    return Form._raw(a.degree + 1, out)


# -- C-splitting ---------------------------------------------------------


def project(a: Form, contact: int, horizontal: int) -> Form:
    """Component with exactly ``contact`` om-factors and ``horizontal`` dx-factors."""
    a = as_form(a)
    if a._terms and contact + horizontal != a.degree:
        raise ValueError(
            f"bidegree ({contact}, {horizontal}) does not add up to degree {a.degree}"
        )
    return Form._raw(
        contact + horizontal,
        {w: c for w, c in a._terms.items() if contact_degree(w) == contact},
    )


def split(a: Form) -> dict[int, Form]:
    """All non-zero components keyed by contact degree."""
    out: dict[int, dict] = {}
    for w, c in a._terms.items():
        out.setdefault(contact_degree(w), {})[w] = c
    return {p: Form._raw(a.degree, t) for p, t in sorted(out.items())}


def horizontalize(a: Form) -> Form:
    """``h``: the purely horizontal component (zero above the base dimension)."""
    a = as_form(a)
    return project(a, 0, a.degree)


def vertical(a: Form) -> Form:
    """``v = id - h``: every term with at least one contact factor."""
    a = as_form(a)
    return contact_part(a, 1)


def contact_part(a: Form, p: int) -> Form:
    """Sum of the terms with contact degree at least ``p``."""
    if p < 0:
        raise ValueError("p must be non-negative")
    a = as_form(a)
    return Form._raw(a.degree, {w: c for w, c in a._terms.items() if contact_degree(w) >= p})


def is_p_contact(a: Form, p: int) -> bool:
    """Membership in the ``p``-th contact ideal: every term has >= p om-factors."""
    if p < 0:
        raise ValueError("p must be non-negative")
    return all(contact_degree(w) >= p for w in as_form(a)._terms)


def dbar(a: Form, p: int | None = None, n: int | None = None) -> Form:
    """Differential of the zeroth page: contact-degree-``p`` part of ``d a``.

    Without ``p`` the input must be homogeneous in contact degree.  With
    ``p`` the input is read as a class modulo ``(p+1)``-contact forms and must
    be ``p``-contact.
    """
    a = as_form(a)
    if not a._terms:
        return Form.zero(a.degree + 1)
    if p is None:
        p, _ = a.bidegree()
    elif not is_p_contact(a, p):
        raise ValueError(f"form is not {p}-contact")
    return project(d(a, n), p, a.degree + 1 - p)


def dhat(a: Form, n: int | None = None) -> Form:
    """Standard horizontal differential: the part of ``d`` raising horizontal degree."""
    a = as_form(a)
    n = _need_n(a, n)
    total = Form.zero(a.degree + 1)
    for p, comp in split(a).items():
        total = total + project(d(comp, n), p, a.degree + 1 - p)
    return total


def contact_differential(a: Form, n: int | None = None) -> Form:
    """``Cd = d - dhat``: the part of ``d`` raising contact degree."""
    a = as_form(a)
    return d(a, n) - dhat(a, n)


# -- homotopy ------------------------------------------------------------


def contact_homotopy(a: Form) -> Form:
    """Fibre-scaling homotopy operator ``A``.

    Pull back along ``(t, x, u_sigma) -> (x, t u_sigma)`` (so that
    ``om -> t om + u dt``), contract with ``d/dt`` after moving ``dt`` to the
    front, and integrate over ``t in [0, 1]``.  With this convention
    ``a = A(da) + d(A a) + base_part(a)`` for every form; ``base_part``
    vanishes on contact forms.
    """
    a = as_form(a)
    out: dict = {}
    for word, coeff in a._terms.items():
        positions = [j for j, c in enumerate(word) if c.kind == OMEGA]
        if not positions:
            continue
        c_om = len(positions)
        for j in positions:
            cov = word[j]
            rest = word[:j] + word[j + 1:]
            var = ((_omega_coord(cov), 1),)
            sign = -1 if j & 1 else 1
            terms = {}
            for mono, val in coeff.terms.items():
                weight = Fraction(sign, fibre_degree(mono) + c_om)
                new = mono_mul(mono, var)
                terms[new] = terms.get(new, 0) + val * weight
            _accumulate(out, rest, JetPoly(terms))
    return Form._raw(max(a.degree - 1, 0), out)


def base_part(a: Form) -> Form:
    """Pull-back to the zero section: drop contact terms, set every ``u`` to 0."""
    a = as_form(a)
    out = {}
    for word, coeff in a._terms.items():
        if contact_degree(word):
            continue
        kept = {m: c for m, c in coeff.terms.items() if not fibre_degree(m)}
        if kept:
            out[word] = JetPoly(kept)
    return Form._raw(a.degree, out)


class PrimitiveError(ArithmeticError):
    """No primitive of the requested contact degree could be constructed."""


def _dhat_image(word: tuple, mono: tuple, n: int) -> dict:
    image = dhat(Form._raw(len(word), {word: JetPoly._raw({mono: 1})}), n)
    return {(w, m): v for w, c in image._terms.items() for m, v in c.terms.items()}


def _dhat_preimages(word: tuple, mono: tuple, n: int) -> set:
    """Candidate ``(word, monomial)`` pairs whose ``dhat`` can produce ``mono*word``."""
    out = set()
    for k, cov in enumerate(word):
        if cov.kind != DX:
            continue
        lam = cov.index
        rest = word[:k] + word[k + 1:]
        # D_lam hits the coefficient
        out.add((rest, mono_mul(mono, ((JetCoord.base(lam), 1),))))
        for v, p in mono:
            if v.kind == FIBRE and v.sigma[lam] > 0:
                lowered = JetCoord.fibre(v.index, v.sigma.difference(MultiIndex.unit(n, lam)))
                powers = dict(mono)
                powers[v] -= 1
                powers[lowered] = powers.get(lowered, 0) + 1
                out.add((rest, _sorted_mono(powers)))
        # D_lam hits a contact factor
        for j, c in enumerate(rest):
            if c.kind == OMEGA and c.sigma[lam] > 0:
                lowered = Covector.omega(c.index, c.sigma.difference(MultiIndex.unit(n, lam)))
                if lowered in rest:
                    continue
                s, w = sort_word(rest[:j] + (lowered,) + rest[j + 1:])
                if s:
                    out.add((w, mono))
    return out


def solve_dhat(target: Form, n: int, max_rounds: int = 6) -> Form:
    """Find ``psi`` with ``dhat(psi) == target`` by undetermined coefficients.

    The ansatz starts from the preimages of the target's monomials and is
    enlarged with preimages of any stray image monomials until the exact
    linear system becomes consistent.
    """
    if not target:
        return Form.zero(max(target.degree - 1, 0))
    rhs = {(w, m): v for w, c in target._terms.items() for m, v in c.terms.items()}
    max_order = target.order()
    max_deg = max(c.degree() for c in target._terms.values()) + 1
    candidates: set = set()
    frontier = set(rhs)
    images: dict = {}
    for _ in range(max_rounds):
        new = set()
        for w, m in frontier:
            for cand in _dhat_preimages(w, m, n):
                cw, cm = cand
                if cand in candidates:
                    continue
                if sum(p for _, p in cm) > max_deg:
                    continue
                if max((v.order() for v, _ in cm), default=0) > max_order:
                    continue
                if max((c.order() for c in cw if c.kind == OMEGA), default=0) > max_order:
                    continue
                new.add(cand)
        candidates |= new
        for cand in new:
            images[cand] = _dhat_image(cand[0], cand[1], n)
        eqs: dict = {key: {} for key in rhs}
        for cand, img in images.items():
            for key, v in img.items():
                eqs.setdefault(key, {})[cand] = v
        rows = [(eqs[key], rhs.get(key, 0)) for key in sorted(eqs, key=repr)]
        sol = solve_sparse(rows)
        if sol is not None:
            out: dict = {}
            for (w, m), v in sol.items():
                if v:
                    out.setdefault(w, {})[m] = v
            psi = Form._raw(target.degree - 1, {w: JetPoly(t) for w, t in out.items()})
            if dhat(psi, n) == target:
                return psi
        stray = {key for img in images.values() for key in img} - set(rhs)
        frontier = stray
        if not frontier:
            break
    raise PrimitiveError("no horizontal primitive found within the polynomial ansatz")


def contact_primitive(a: Form, p: int, n: int | None = None) -> Form:
    """A ``p``-contact primitive of a closed ``p``-contact form (``p >= 1``).

    ``A a`` is a primitive but in general only ``(p-1)``-contact.  Its
    ``(p-1)``-contact component is ``dhat``-closed of horizontal degree below
    ``n``; it is removed by subtracting ``d psi`` for a solution ``psi`` of
    ``dhat psi = component``.
    """
    a = as_form(a)
    if p < 1:
        raise ValueError("contact exactness needs p >= 1")
    if not is_p_contact(a, p):
        raise ValueError(f"form is not {p}-contact")
    n = _need_n(a, n)
    if d(a, n):
        raise ValueError("form is not closed")
    theta = contact_homotopy(a)
    low = project(theta, p - 1, theta.degree - p + 1) if theta else theta
    if low:
        q = theta.degree - (p - 1)
        if q == 0:
            # only constants survive here (p == 1, zero-form)
            if p - 1 or not all(c.is_constant() for c in low._terms.values()):
                raise PrimitiveError("closed horizontal zero-form is not constant")
            theta = theta - low
        else:
            psi = solve_dhat(low, n)
            theta = theta - d(psi, n)
    if not is_p_contact(theta, p) or d(theta, n) != a:
        raise PrimitiveError("correction did not produce a p-contact primitive")
    return theta


# -- sections ------------------------------------------------------------


def pullback_by_section(a: Form, s: PolySection) -> Form:
    """``(j s)^* a``: contact factors die, the rest is pulled back coefficientwise."""
    a = as_form(a)
    h = {w: c for w, c in a._terms.items() if not contact_degree(w)}
    if not h:
        return Form.zero(a.degree)
    r = max(c.order() for c in h.values())
    values = s.prolong(r)
    return Form._raw(a.degree, {w: c.substitute(values) for w, c in h.items()})
