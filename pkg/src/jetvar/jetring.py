"""Differential polynomials on a finite-order jet space.

Coordinates on the jet space are the base coordinates ``x^lam`` and the fibre
coordinates ``u^i_sigma``.  A :class:`JetPoly` is a polynomial in these with
exact rational coefficients; it is immutable and stored in canonical form
(a dict from monomials to non-zero coefficients), so ``==`` is structural.

All base and fibre indices are 0-based.  Rendering adds 1 where names like
``x1`` are generated.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from types import MappingProxyType
from typing import Iterable, Mapping, NamedTuple, Sequence

from .multiindex import MultiIndex

BASE = 0
FIBRE = 1

Rational = Fraction


class JetSpace:
    """Dimensions of the fibred chart: ``n`` base and ``m`` fibre coordinates.

    ``base_names`` and ``fibre_names`` are only used for rendering and
    parsing.  Defaults are ``x``/``u`` when the dimension is 1 and
    ``x1..xn``/``u1..um`` otherwise.
    """

    def __init__(
        self,
        n: int,
        m: int,
        base_names: Sequence[str] | None = None,
        fibre_names: Sequence[str] | None = None,
    ):
        if n < 1 or m < 1:
            raise ValueError(f"need n >= 1 and m >= 1, got n={n}, m={m}")
        self.n = n
        self.m = m
        if base_names is None:
            base_names = ["x"] if n == 1 else [f"x{k + 1}" for k in range(n)]
        if fibre_names is None:
            fibre_names = ["u"] if m == 1 else [f"u{k + 1}" for k in range(m)]
        if len(base_names) != n or len(fibre_names) != m:
            raise ValueError("coordinate name lists do not match n, m")
        self.base_names = tuple(base_names)
        self.fibre_names = tuple(fibre_names)

    def __repr__(self):
        return f"JetSpace(n={self.n}, m={self.m})"

    def __eq__(self, other):
        return (
            isinstance(other, JetSpace)
            and (self.n, self.m, self.base_names, self.fibre_names)
            == (other.n, other.m, other.base_names, other.fibre_names)
        )

    def __hash__(self):
        return hash((self.n, self.m, self.base_names, self.fibre_names))

    # convenience constructors
    def x(self, lam: int) -> "JetPoly":
        if not 0 <= lam < self.n:
            raise ValueError(f"base index {lam} out of range for n={self.n}")
        return JetPoly.variable(JetCoord.base(lam))

    def u(self, i: int = 0, sigma: MultiIndex | Sequence[int] | None = None) -> "JetPoly":
        return JetPoly.variable(self.fibre(i, sigma))

    def fibre(self, i: int, sigma=None) -> "JetCoord":
        if not 0 <= i < self.m:
            raise ValueError(f"fibre index {i} out of range for m={self.m}")
        if sigma is None:
            sigma = MultiIndex.empty(self.n)
        elif not isinstance(sigma, MultiIndex):
            sigma = MultiIndex(sigma)
        if len(sigma) != self.n:
            raise ValueError(f"multi-index {tuple(sigma)} does not have n={self.n} entries")
        return JetCoord.fibre(i, sigma)

    def empty(self) -> MultiIndex:
        return MultiIndex.empty(self.n)

    def unit(self, lam: int) -> MultiIndex:
        return MultiIndex.unit(self.n, lam)

    def vol_indices(self) -> tuple[int, ...]:
        return tuple(range(self.n))


class JetCoord(NamedTuple):
    """``Base(lam)`` (``sigma`` is None) or ``Fibre(i, sigma)``.

    ``Fibre(i, empty)`` is ``u^i`` itself.
    """

    kind: int
    index: int
    sigma: MultiIndex | None

    @classmethod
    def base(cls, lam: int) -> "JetCoord":
        return cls(BASE, lam, None)

    @classmethod
    def fibre(cls, i: int, sigma: MultiIndex) -> "JetCoord":
        return cls(FIBRE, i, sigma)

    @property
    def is_base(self) -> bool:
        return self.kind == BASE

    def order(self) -> int:
        return 0 if self.sigma is None else self.sigma.order()


@lru_cache(maxsize=None)
def coord_key(c: JetCoord):
    """Sort key: base coordinates first, then fibre by (i, graded-lex sigma)."""
    if c.kind == BASE:
        return (BASE, c.index, ())
    return (FIBRE, c.index, c.sigma._key)


@lru_cache(maxsize=None)
def _shift(c: JetCoord, lam: int) -> JetCoord:
    return JetCoord(FIBRE, c.index, c.sigma.add(lam))


def _sorted_mono(powers: Mapping[JetCoord, int]) -> tuple:
    return tuple(sorted(((c, p) for c, p in powers.items() if p), key=lambda cp: coord_key(cp[0])))


def mono_mul(a: tuple, b: tuple) -> tuple:
    if not a:
        return b
    if not b:
        return a
    powers = dict(a)
    for c, p in b:
        powers[c] = powers.get(c, 0) + p
    return _sorted_mono(powers)


def _mono_times_var(mono: tuple, var: JetCoord) -> tuple:
    return mono_mul(mono, ((var, 1),))


def _as_rational(c) -> Fraction | int:
    if isinstance(c, (int, Fraction)):
        return c
    if isinstance(c, str):
        return Fraction(c)
    raise TypeError(f"not an exact rational: {c!r}")


class JetPoly:
    """Polynomial in jet coordinates with exact rational coefficients."""

    __slots__ = ("_terms", "_hash")

    def __init__(self, terms: Mapping[tuple, object] | None = None):
        clean = {}
        if terms:
            for mono, coeff in terms.items():
                coeff = _as_rational(coeff)
                if coeff:
                    clean[mono] = coeff
        self._terms = clean
        self._hash = None

    @classmethod
    def _raw(cls, terms: dict) -> "JetPoly":
        # caller guarantees canonical monomials and non-zero coefficients
        obj = cls.__new__(cls)
        obj._terms = terms
        obj._hash = None
        return obj

    @classmethod
    def zero(cls) -> "JetPoly":
        return cls._raw({})

    @classmethod
    def constant(cls, c) -> "JetPoly":
        c = _as_rational(c)
        return cls._raw({(): c} if c else {})

    @classmethod
    def variable(cls, coord: JetCoord, power: int = 1) -> "JetPoly":
        return cls._raw({((coord, power),): 1} if power else {(): 1})

    @classmethod
    def from_monomial(cls, powers: Mapping[JetCoord, int], coeff=1) -> "JetPoly":
        return cls({_sorted_mono(powers): coeff})

    # -- inspection -------------------------------------------------------

    @property
    def terms(self) -> Mapping[tuple, Fraction | int]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self) -> bool:
        return bool(self._terms)

    def is_constant(self) -> bool:
        return all(not mono for mono in self._terms)

    def constant_term(self):
        return self._terms.get((), 0)

    def variables(self) -> set[JetCoord]:
        return {c for mono in self._terms for c, _ in mono}

    def order(self) -> int:
        """Highest derivative order of any fibre coordinate present (0 if none)."""
        return max((c.order() for c in self.variables()), default=0)

    def degree(self) -> int:
        """Total polynomial degree; -1 for the zero polynomial."""
        return max((sum(p for _, p in mono) for mono in self._terms), default=-1)

    def degree_in(self, coords: Iterable[JetCoord]) -> int:
        coords = set(coords)
        return max(
            (sum(p for c, p in mono if c in coords) for mono in self._terms),
            default=-1,
        )

    def depends_on_fibre(self) -> bool:
        return any(c.kind == FIBRE for c in self.variables())

    def sorted_terms(self) -> list[tuple[tuple, Fraction | int]]:
        """Terms in graded-lex order (higher degree first)."""

        def key(item):
            mono = item[0]
            deg = sum(p for _, p in mono)
            return (-deg, [(coord_key(c), -p) for c, p in mono])

        return sorted(self._terms.items(), key=key)

    # -- arithmetic -------------------------------------------------------

    @staticmethod
    def coerce(other) -> "JetPoly":
        if isinstance(other, JetPoly):
            return other
        return JetPoly.constant(other)

    def __add__(self, other):
        if not isinstance(other, JetPoly):
            if isinstance(other, (int, Fraction)):
                other = JetPoly.constant(other)
            else:
                return NotImplemented
        if not other._terms:
            return self
        if not self._terms:
            return other
        out = dict(self._terms)
        for mono, c in other._terms.items():
            v = out.get(mono, 0) + c
            if v:
                out[mono] = v
            else:
                out.pop(mono, None)
        return JetPoly._raw(out)

    __radd__ = __add__

    def __neg__(self):
        return JetPoly._raw({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        if not isinstance(other, (JetPoly, int, Fraction)):
            return NotImplemented
        return self + (-JetPoly.coerce(other))

    def __rsub__(self, other):
        return (-self) + other

    def scale(self, c) -> "JetPoly":
        c = _as_rational(c)
        if not c:
            return JetPoly.zero()
        return JetPoly._raw({m: v * c for m, v in self._terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        if not isinstance(other, JetPoly):
            return NotImplemented
        if not self._terms or not other._terms:
            return JetPoly.zero()
        out: dict = {}
        for m1, c1 in self._terms.items():
            for m2, c2 in other._terms.items():
                mono = mono_mul(m1, m2)
                v = out.get(mono, 0) + c1 * c2
                if v:
                    out[mono] = v
                else:
                    out.pop(mono, None)
        return JetPoly._raw(out)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(other)
        return NotImplemented

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self.scale(Fraction(1) / Fraction(other))
        if isinstance(other, JetPoly) and other.is_constant() and other:
            return self.scale(Fraction(1) / Fraction(other.constant_term()))
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            return NotImplemented
        result = JetPoly.constant(1)
        base = self
        while k:
            if k & 1:
                result = result * base
            k >>= 1
            if k:
                base = base * base
        return result

    def __eq__(self, other):
        if isinstance(other, JetPoly):
            return self._terms == other._terms
        if isinstance(other, (int, Fraction)):
            return self._terms == ({(): other} if other else {})
        return NotImplemented

    def __hash__(self):
        if self._hash is None:
            self._hash = hash(frozenset(self._terms.items()))
        return self._hash

    def __repr__(self):
        from .render import poly_text

        return f"JetPoly({poly_text(self)!r})"

    # -- calculus ---------------------------------------------------------

    def partial(self, coord: JetCoord) -> "JetPoly":
        """Formal partial derivative with respect to one jet coordinate."""
        out: dict = {}
        for mono, c in self._terms.items():
            for k, (v, p) in enumerate(mono):
                if v == coord:
                    if p == 1:
                        new = mono[:k] + mono[k + 1:]
                    else:
                        new = mono[:k] + ((v, p - 1),) + mono[k + 1:]
                    out[new] = out.get(new, 0) + c * p
                    break
        return JetPoly({k: v for k, v in out.items()})

    def total_derivative(self, lam: int) -> "JetPoly":
        """``D_lam f = df/dx^lam + u^j_{sigma lam} df/du^j_sigma``."""
        out: dict = {}
        for mono, c in self._terms.items():
            for k, (v, p) in enumerate(mono):
                rest = mono[:k] + (((v, p - 1),) if p > 1 else ()) + mono[k + 1:]
                if v.kind == BASE:
                    if v.index != lam:
                        continue
                    new = rest
                else:
                    new = _mono_times_var(rest, _shift(v, lam))
                val = out.get(new, 0) + c * p
                out[new] = val
        return JetPoly(out)

    def total_derivative_multi(self, sigma: MultiIndex) -> "JetPoly":
        """``D_sigma f``, applying ``D_lam`` once per occurrence of ``lam``."""
        f = self
        for lam in sigma.word():
            if not f:
                break
            f = f.total_derivative(lam)
        return f

    def substitute(self, mapping: Mapping[JetCoord, "JetPoly"]) -> "JetPoly":
        """Replace coordinates by polynomials; unmapped coordinates stay."""
        cache: dict = {}

        def power(v, p):
            key = (v, p)
            if key not in cache:
                base = mapping.get(v)
                if base is None:
                    base = JetPoly.variable(v)
                cache[key] = base ** p
            return cache[key]

        result = JetPoly.zero()
        for mono, c in self._terms.items():
            term = JetPoly.constant(c)
            for v, p in mono:
                term = term * power(v, p)
                if not term:
                    break
            result = result + term
        return result

    def evaluate(self, point: Mapping[JetCoord, object]):
        """Exact value at a rational point (all variables must be given)."""
        total = Fraction(0)
        for mono, c in self._terms.items():
            val = Fraction(c)
            for v, p in mono:
                val *= Fraction(point[v]) ** p
            total += val
        return total

    def map_monomials(self, fn) -> "JetPoly":
        """Rescale each monomial: ``fn(mono) -> factor``."""
        return JetPoly({m: c * fn(m) for m, c in self._terms.items()})

    # -- serialization ----------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for mono, c in self.sorted_terms():
            entries = []
            for v, p in mono:
                if v.kind == BASE:
                    entries.append(["x", v.index, p])
                else:
                    entries.append(["u", v.index, list(v.sigma), p])
            terms.append({"coeff": str(Fraction(c)), "monomial": entries})
        return {"terms": terms}

    @classmethod
    def from_json(cls, data: Mapping) -> "JetPoly":
        out: dict = {}
        for term in data["terms"]:
            powers: dict = {}
            for entry in term["monomial"]:
                if entry[0] == "x":
                    _, lam, p = entry
                    coord = JetCoord.base(int(lam))
                elif entry[0] == "u":
                    _, i, counts, p = entry
                    coord = JetCoord.fibre(int(i), MultiIndex(counts))
                else:
                    raise ValueError(f"unknown coordinate tag {entry[0]!r}")
                powers[coord] = powers.get(coord, 0) + int(p)
            mono = _sorted_mono(powers)
            out[mono] = out.get(mono, 0) + Fraction(term["coeff"])
        return cls(out)


def partial(f: JetPoly, coord: JetCoord) -> JetPoly:
    return f.partial(coord)


def total_derivative(f: JetPoly, lam: int) -> JetPoly:
    return f.total_derivative(lam)


def total_derivative_multi(f: JetPoly, sigma: MultiIndex) -> JetPoly:
    return f.total_derivative_multi(sigma)


def fibre_degree(mono: tuple) -> int:
    return sum(p for c, p in mono if c.kind == FIBRE)


class PolySection:
    """A polynomial section ``x -> (x, s^1(x), ..., s^m(x))``."""

    def __init__(self, space: JetSpace, components: Sequence[JetPoly]):
        components = tuple(JetPoly.coerce(c) for c in components)
        if len(components) != space.m:
            raise ValueError(f"section needs {space.m} components, got {len(components)}")
        for c in components:
            if c.depends_on_fibre():
                raise ValueError("section components must depend on base coordinates only")
        self.space = space
        self.components = components

    def __repr__(self):
        return f"PolySection({self.components!r})"

    def prolong(self, r: int) -> dict[JetCoord, JetPoly]:
        """Values of ``j_r s``: ``u^i_sigma -> d^|sigma| s^i / dx^sigma``."""
        if r < 0:
            raise ValueError("prolongation order must be non-negative")
        from .multiindex import enumerate_multiindices

        out: dict[JetCoord, JetPoly] = {}
        for lam in range(self.space.n):
            c = JetCoord.base(lam)
            out[c] = JetPoly.variable(c)
        for i, s in enumerate(self.components):
            for sigma in enumerate_multiindices(self.space.n, r):
                g = s
                for lam in sigma.word():
                    g = g.partial(JetCoord.base(lam))
                out[JetCoord.fibre(i, sigma)] = g
        return out

    def pullback(self, f: JetPoly) -> JetPoly:
        return pullback(f, self)


def pullback(f: JetPoly, s: PolySection) -> JetPoly:
    """``f o j_r s`` as a polynomial in the base coordinates."""
    return f.substitute(s.prolong(f.order()))


def prolong(s: PolySection, r: int) -> dict[JetCoord, JetPoly]:
    return s.prolong(r)
