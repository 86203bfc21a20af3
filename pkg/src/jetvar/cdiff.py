"""C-differential operators, adjoints and evolutionary fields.

A :class:`CDiffOp` is a matrix whose entries are total-derivative
polynomials ``sum_sigma a^sigma D_sigma`` with coefficients written to the
left of the derivatives.  That normal form is unique, so equality of
operators is structural.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Mapping, Sequence

from .forms import DX, OMEGA, Covector, Form, _accumulate, as_form
from .jetring import FIBRE, JetPoly, JetSpace
from .multiindex import MultiIndex, choose


def _derivatives(f: JetPoly, sigmas) -> dict[MultiIndex, JetPoly]:
    """``D_rho f`` for every ``rho`` in ``sigmas`` (memoised along the lattice)."""
    memo: dict[MultiIndex, JetPoly] = {}

    def get(rho: MultiIndex) -> JetPoly:
        if rho in memo:
            return memo[rho]
        if rho.is_empty():
            val = f
        else:
            lam = next(k for k, c in enumerate(rho) if c)
            prev = MultiIndex(c - (k == lam) for k, c in enumerate(rho))
            val = get(prev).total_derivative(lam)
        memo[rho] = val
        return val

    return {rho: get(rho) for rho in sigmas}


def leibniz(sigma: MultiIndex, a: JetPoly) -> dict[MultiIndex, JetPoly]:
    """Normal form of ``D_sigma o a``: ``sum_rho choose(sigma, rho) (D_rho a) D_{sigma-rho}``."""
    out: dict[MultiIndex, JetPoly] = {}
    rhos = list(sigma.submultiindices())
    ders = _derivatives(a, rhos)
    for rho in rhos:
        term = ders[rho]
        if not term:
            continue
        key = sigma.difference(rho)
        out[key] = out[key] + term * choose(sigma, rho) if key in out else term * choose(sigma, rho)
    return {k: v for k, v in out.items() if v}


def _add_entry(target: dict, sigma: MultiIndex, coeff: JetPoly) -> None:
    if not coeff:
        return
    v = target.get(sigma)
    v = coeff if v is None else v + coeff
    if v:
        target[sigma] = v
    else:
        target.pop(sigma, None)


class CDiffOp:
    """``rows x cols`` matrix of operators ``sum_sigma a^sigma_{ab} D_sigma``."""

    __slots__ = ("rows", "cols", "n", "_entries")

    def __init__(self, rows: int, cols: int, n: int, entries: Mapping | None = None):
        self.rows, self.cols, self.n = rows, cols, n
        self._entries: dict[tuple[int, int], dict[MultiIndex, JetPoly]] = {}
        if entries:
            for (a, b), entry in entries.items():
                if not (0 <= a < rows and 0 <= b < cols):
                    raise ValueError(f"entry ({a}, {b}) outside a {rows}x{cols} operator")
                for sigma, coeff in entry.items():
                    sigma = sigma if isinstance(sigma, MultiIndex) else MultiIndex(sigma)
                    if len(sigma) != n:
                        raise ValueError(f"multi-index {tuple(sigma)} does not have n={n} entries")
                    _add_entry(self._entries.setdefault((a, b), {}), sigma, JetPoly.coerce(coeff))
        self._entries = {k: v for k, v in self._entries.items() if v}

    # -- constructors -----------------------------------------------------

    @classmethod
    def zero(cls, rows: int, cols: int, n: int) -> "CDiffOp":
        return cls(rows, cols, n)

    @classmethod
    def identity(cls, size: int, n: int) -> "CDiffOp":
        e = MultiIndex.empty(n)
        return cls(size, size, n, {(a, a): {e: JetPoly.constant(1)} for a in range(size)})

    @classmethod
    def scalar(cls, f, n: int) -> "CDiffOp":
        return cls(1, 1, n, {(0, 0): {MultiIndex.empty(n): JetPoly.coerce(f)}})

    @classmethod
    def total(cls, sigma: MultiIndex, coeff=1) -> "CDiffOp":
        """The scalar operator ``coeff * D_sigma``."""
        return cls(1, 1, len(sigma), {(0, 0): {sigma: JetPoly.coerce(coeff)}})

    # -- inspection -------------------------------------------------------

    def entry(self, a: int, b: int) -> dict[MultiIndex, JetPoly]:
        return dict(self._entries.get((a, b), {}))

    @property
    def entries(self) -> dict[tuple[int, int], dict[MultiIndex, JetPoly]]:
        return {k: dict(v) for k, v in self._entries.items()}

    def is_zero(self) -> bool:
        return not self._entries

    def __bool__(self):
        return bool(self._entries)

    def order(self) -> int:
        """Largest ``|sigma| + order(a^sigma)`` over all entries; 0 for the zero operator."""
        return max(
            (s.order() + c.order() for e in self._entries.values() for s, c in e.items()),
            default=0,
        )

    def derivative_order(self) -> int:
        return max((s.order() for e in self._entries.values() for s in e), default=0)

    @property
    def shape(self) -> tuple[int, int]:
        return self.rows, self.cols

    def __eq__(self, other):
        if not isinstance(other, CDiffOp):
            return NotImplemented
        return self.shape == other.shape and self._entries == other._entries

    def __hash__(self):
        return hash((self.shape, frozenset((k, frozenset(v.items())) for k, v in self._entries.items())))

    def __repr__(self):
        from .render import op_text

        return f"CDiffOp({op_text(self)!r})"

    # -- linear structure -------------------------------------------------

    def _check_shape(self, other: "CDiffOp") -> None:
        if self.shape != other.shape:
            raise ValueError(f"shape mismatch: {self.shape} vs {other.shape}")

    def __add__(self, other):
        if not isinstance(other, CDiffOp):
            return NotImplemented
        self._check_shape(other)
        out = {k: dict(v) for k, v in self._entries.items()}
        for k, e in other._entries.items():
            target = out.setdefault(k, {})
            for s, c in e.items():
                _add_entry(target, s, c)
        return CDiffOp._from_clean(self.rows, self.cols, self.n, out)

    def __neg__(self):
        return CDiffOp._from_clean(
            self.rows, self.cols, self.n,
            {k: {s: -c for s, c in e.items()} for k, e in self._entries.items()},
        )

    def __sub__(self, other):
        if not isinstance(other, CDiffOp):
            return NotImplemented
        return self + (-other)

    def scale(self, f) -> "CDiffOp":
        """Left multiplication by a function (or rational)."""
        f = JetPoly.coerce(f)
        return CDiffOp._from_clean(
            self.rows, self.cols, self.n,
            {k: {s: f * c for s, c in e.items()} for k, e in self._entries.items()},
        )

    def __rmul__(self, other):
        if isinstance(other, (JetPoly, int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __mul__(self, other):
        if isinstance(other, CDiffOp):
            return compose(self, other)
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __matmul__(self, other):
        if not isinstance(other, CDiffOp):
            return NotImplemented
        return compose(self, other)

    @classmethod
    def _from_clean(cls, rows, cols, n, entries) -> "CDiffOp":
        obj = cls.__new__(cls)
        obj.rows, obj.cols, obj.n = rows, cols, n
        obj._entries = {k: {s: c for s, c in v.items() if c} for k, v in entries.items()}
        obj._entries = {k: v for k, v in obj._entries.items() if v}
        return obj

    def transpose(self) -> "CDiffOp":
        return CDiffOp._from_clean(
            self.cols, self.rows, self.n, {(b, a): dict(e) for (a, b), e in self._entries.items()}
        )

    # -- action -----------------------------------------------------------

    def __call__(self, phi: Sequence[JetPoly]) -> tuple[JetPoly, ...]:
        return apply(self, phi)

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        rows = []
        for a in range(self.rows):
            row = []
            for b in range(self.cols):
                e = self._entries.get((a, b), {})
                row.append([{"sigma": list(s), "coeff": e[s].to_json()} for s in sorted(e)])
            rows.append(row)
        return {"rows": self.rows, "cols": self.cols, "n": self.n, "entries": rows}

    @classmethod
    def from_json(cls, data: Mapping) -> "CDiffOp":
        entries = {}
        for a, row in enumerate(data["entries"]):
            for b, cell in enumerate(row):
                entries[(a, b)] = {MultiIndex(t["sigma"]): JetPoly.from_json(t["coeff"]) for t in cell}
        return cls(int(data["rows"]), int(data["cols"]), int(data["n"]), entries)


def apply(op: CDiffOp, phi: Sequence) -> tuple[JetPoly, ...]:
    """``(op phi)_a = sum_{b, sigma} a^sigma_{ab} D_sigma phi_b``."""
    phi = [JetPoly.coerce(p) for p in phi]
    if len(phi) != op.cols:
        raise ValueError(f"operator takes {op.cols} components, got {len(phi)}")
    cache: dict[int, dict[MultiIndex, JetPoly]] = {}
    out = [JetPoly.zero() for _ in range(op.rows)]
    for (a, b), e in op._entries.items():
        if b not in cache:
            sigmas = {s for (_, bb), ee in op._entries.items() if bb == b for s in ee}
            cache[b] = _derivatives(phi[b], sigmas)
        for s, c in e.items():
            out[a] = out[a] + c * cache[b][s]
    return tuple(out)


def compose(op1: CDiffOp, op2: CDiffOp) -> CDiffOp:
    """``op1 o op2`` in normal form, via the Leibniz rule."""
    if op1.cols != op2.rows:
        raise ValueError(f"cannot compose {op1.shape} with {op2.shape}")
    out: dict[tuple[int, int], dict[MultiIndex, JetPoly]] = {}
    for (a, b), e1 in op1._entries.items():
        for (bb, c), e2 in op2._entries.items():
            if bb != b:
                continue
            target = out.setdefault((a, c), {})
            for sigma, a1 in e1.items():
                for tau, a2 in e2.items():
                    for kappa, coeff in leibniz(sigma, a2).items():
                        _add_entry(target, kappa.union(tau), a1 * coeff)
    return CDiffOp._from_clean(op1.rows, op2.cols, op1.n, out)


def adjoint(op: CDiffOp) -> CDiffOp:
    """``(op*)_{ba} = sum_sigma (-1)^|sigma| D_sigma o a^sigma_{ab}``, in normal form."""
    out: dict[tuple[int, int], dict[MultiIndex, JetPoly]] = {}
    for (a, b), e in op._entries.items():
        target = out.setdefault((b, a), {})
        for sigma, coeff in e.items():
            sign = -1 if sigma.order() & 1 else 1
            for kappa, c in leibniz(sigma, coeff).items():
                _add_entry(target, kappa, c if sign > 0 else -c)
    return CDiffOp._from_clean(op.cols, op.rows, op.n, out)


# -- Green's formula ------------------------------------------------------


@dataclass(frozen=True)
class GreenRemainder:
    """``q . op(p) - op*(q) . p`` together with a current whose divergence it is.

    ``current[lam]`` are the components ``J^lam``; the remainder equals
    ``sum_lam D_lam J^lam``.
    """

    remainder: JetPoly
    current: tuple[JetPoly, ...]

    def divergence(self) -> JetPoly:
        total = JetPoly.zero()
        for lam, j in enumerate(self.current):
            total = total + j.total_derivative(lam)
        return total

    def current_form(self) -> Form:
        """The horizontal ``(n-1)``-form ``sum_lam (-1)^lam J^lam dx^0 ^ ..^lam^.. ^ dx^{n-1}``."""
        n = len(self.current)
        terms = {}
        for lam, j in enumerate(self.current):
            word = tuple(Covector.dx(k) for k in range(n) if k != lam)
            terms[word] = j if lam % 2 == 0 else -j
        return Form(n - 1, terms)

    def certify(self, space: JetSpace) -> bool:
        """Independent check: the remainder has vanishing Euler-Lagrange expression."""
        from .variational import euler_lagrange

        return euler_lagrange(self.remainder, space).is_zero()


def green_remainder(op: CDiffOp, p: Sequence, q: Sequence) -> GreenRemainder:
    p = [JetPoly.coerce(v) for v in p]
    q = [JetPoly.coerce(v) for v in q]
    if len(p) != op.cols or len(q) != op.rows:
        raise ValueError(f"operator is {op.shape}; got p of length {len(p)}, q of length {len(q)}")
    lhs = JetPoly.zero()
    for a, val in enumerate(apply(op, p)):
        lhs = lhs + q[a] * val
    rhs = JetPoly.zero()
    for b, val in enumerate(apply(adjoint(op), q)):
        rhs = rhs + val * p[b]
    remainder = lhs - rhs

    current = [JetPoly.zero() for _ in range(op.n)]
    for (a, b), e in op._entries.items():
        for sigma, coeff in e.items():
            f = q[a] * coeff
            word = sigma.word()
            for k, lam in enumerate(word):
                rest = MultiIndex.from_word(op.n, word[k + 1:])
                current[lam] = current[lam] + f * p[b].total_derivative_multi(rest)
                f = -f.total_derivative(lam)
    return GreenRemainder(remainder, tuple(current))


# -- evolutionary fields --------------------------------------------------


@dataclass(frozen=True)
class EvolutionaryField:
    """Generator ``phi = (phi^1, ..., phi^m)``; prolongs to ``D_sigma phi^i d/du^i_sigma``."""

    components: tuple[JetPoly, ...]

    def __init__(self, components: Sequence):
        object.__setattr__(self, "components", tuple(JetPoly.coerce(c) for c in components))

    def component(self, i: int, sigma: MultiIndex) -> JetPoly:
        return self.components[i].total_derivative_multi(sigma)

    def __call__(self, f: JetPoly) -> JetPoly:
        """Action of the prolonged field on a function."""
        total = JetPoly.zero()
        for v in f.variables():
            if v.kind == FIBRE:
                total = total + f.partial(v) * self.component(v.index, v.sigma)
        return total


def evo_apply(phi: EvolutionaryField | Sequence, a: Form) -> Form:
    """Insertion ``Evo_phi -| a``.

    Uses ``om^i_sigma(Evo_phi) = D_sigma phi^i`` and ``dx(Evo_phi) = 0``; the
    factor in position ``j`` (0-based) is removed with sign ``(-1)^j``.
    """
    if not isinstance(phi, EvolutionaryField):
        phi = EvolutionaryField(phi)
    a = as_form(a)
    if a.degree < 1:
        raise ValueError("cannot insert a vector field into a 0-form")
    out: dict = {}
    for word, coeff in a.terms.items():
        for j, c in enumerate(word):
            if c.kind != OMEGA:
                continue
            val = phi.component(c.index, c.sigma)
            if val:
                _accumulate(out, word[:j] + word[j + 1:], coeff * val, -1 if j & 1 else 1)
    return Form._raw(a.degree - 1, out)


def linearization(F: Sequence, space: JetSpace) -> CDiffOp:
    """Frechet derivative: ``entries[a][i][sigma] = dF_a / du^i_sigma``."""
    F = [JetPoly.coerce(f) for f in F]
    out: dict = {}
    for a, f in enumerate(F):
        for v in f.variables():
            if v.kind == FIBRE:
                out.setdefault((a, v.index), {})[v.sigma] = f.partial(v)
    return CDiffOp(len(F), space.m, space.n, out)


# -- forms as multi-operators -------------------------------------------


class MultiOperator:
    """Antisymmetric multi-C-differential operator attached to a homogeneous form.

    ``terms`` maps ``(slots, hword)`` to a coefficient, where ``slots`` is a
    strictly increasing tuple of contact covectors ``(i, sigma)`` and
    ``hword`` an increasing tuple of base indices, exactly as in the form
    ``f dx^hword ^ om^slots``.  Evaluation uses the determinant formula

        nabla(phi_1..phi_p) = (-1)^(l p + p(p-1)/2) f det[D_{sigma_a} phi_b^{i_a}] dx^hword

    which agrees with iterated insertion of evolutionary fields.
    """

    def __init__(self, p: int, l: int, n: int, terms: Mapping):
        self.p, self.l, self.n = p, l, n
        self.terms = {k: JetPoly.coerce(v) for k, v in terms.items() if v}

    def __eq__(self, other):
        if not isinstance(other, MultiOperator):
            return NotImplemented
        return (self.p, self.l, self.terms) == (other.p, other.l, other.terms)

    def __call__(self, *phis) -> Form:
        if len(phis) != self.p:
            raise ValueError(f"operator takes {self.p} arguments, got {len(phis)}")
        phis = [p if isinstance(p, EvolutionaryField) else EvolutionaryField(p) for p in phis]
        sign0 = -1 if (self.l * self.p + self.p * (self.p - 1) // 2) & 1 else 1
        out: dict = {}
        for (slots, hword), f in self.terms.items():
            det = JetPoly.zero()
            for perm in permutations(range(self.p)):
                prod = JetPoly.constant(_perm_sign(perm))
                for a, b in enumerate(perm):
                    i, sigma = slots[a]
                    prod = prod * phis[b].component(i, sigma)
                    if not prod:
                        break
                det = det + prod
            if det:
                _accumulate(out, tuple(Covector.dx(lam) for lam in hword), f * det, sign0)
        return Form._raw(self.l, out)

    def as_cdiffop(self) -> CDiffOp:
        """For ``p = 1``: the ``(#hwords) x m`` operator ``phi -> nabla(phi)`` coefficients.

        Rows follow the sorted horizontal words; for ``l = n`` there is one row
        (the coefficient of the volume form).
        """
        if self.p != 1:
            raise ValueError("only single-argument operators are C-differential matrices")
        hwords = sorted({h for (_, h) in self.terms})
        sign = -1 if self.l & 1 else 1
        entries: dict = {}
        m = 1 + max((slots[0][0] for (slots, _) in self.terms), default=0)
        for (slots, hword), f in self.terms.items():
            i, sigma = slots[0]
            entries.setdefault((hwords.index(hword), i), {})[sigma] = f * sign
        return CDiffOp(max(len(hwords), 1), m, self.n, entries)


def _perm_sign(perm) -> int:
    sign = 1
    perm = list(perm)
    for a in range(len(perm)):
        for b in range(a + 1, len(perm)):
            if perm[a] > perm[b]:
                sign = -sign
    return sign


def form_to_operator(a: Form, n: int) -> MultiOperator:
    """``a -> nabla_a`` for a form homogeneous in contact degree."""
    a = as_form(a)
    p, l = a.bidegree()
    terms = {}
    for word, coeff in a.terms.items():
        hword = tuple(c.index for c in word if c.kind == DX)
        slots = tuple((c.index, c.sigma) for c in word if c.kind == OMEGA)
        terms[(slots, hword)] = coeff
    return MultiOperator(p, l, n, terms)


def operator_to_form(op: MultiOperator) -> Form:
    out: dict = {}
    for (slots, hword), f in op.terms.items():
        word = tuple(Covector.dx(lam) for lam in hword) + tuple(Covector.omega(i, s) for i, s in slots)
        _accumulate(out, word, f)
    return Form._raw(op.p + op.l, out)
