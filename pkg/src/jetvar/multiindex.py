"""Symmetric multi-indices over the base dimensions.

A multi-index is stored as a vector of counts: ``counts[lam]`` is the number
of times the base direction ``lam`` occurs.  Because total derivatives
commute, this is the only information a derivative order carries.

Ordering is graded lexicographic: first by total order, then so that higher
powers of earlier directions come first, e.g. over two directions::

    (0,0) < (1,0) < (0,1) < (2,0) < (1,1) < (0,2) < ...
"""

from __future__ import annotations

import itertools
from math import comb
from typing import Iterable, Iterator, Sequence


class MultiIndex(tuple):
    """Immutable count vector ``(c_1, ..., c_n)`` with graded-lex ordering."""

    __slots__ = ()

    def __new__(cls, counts: Iterable[int]):
        counts = tuple(int(c) for c in counts)
        if not counts:
            raise ValueError("a multi-index needs at least one base direction")
        if any(c < 0 for c in counts):
            raise ValueError(f"negative count in multi-index {counts}")
        return super().__new__(cls, counts)

    @classmethod
    def empty(cls, n: int) -> "MultiIndex":
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, lam: int) -> "MultiIndex":
        """The multi-index of a single derivative along ``lam`` (0-based)."""
        if not 0 <= lam < n:
            raise ValueError(f"base index {lam} out of range for n={n}")
        return cls(1 if k == lam else 0 for k in range(n))

    @classmethod
    def from_word(cls, n: int, word: Sequence[int]) -> "MultiIndex":
        """Build from a sequence of base indices such as ``(0, 0, 1)``."""
        counts = [0] * n
        for lam in word:
            if not 0 <= lam < n:
                raise ValueError(f"base index {lam} out of range for n={n}")
            counts[lam] += 1
        return cls(counts)

    @property
    def n(self) -> int:
        return len(self)

    def order(self) -> int:
        return sum(self)

    def is_empty(self) -> bool:
        return not any(self)

    def word(self) -> tuple[int, ...]:
        """Sorted sequence of base indices, the inverse of ``from_word``."""
        return tuple(lam for lam, c in enumerate(self) for _ in range(c))

    # -- algebra ----------------------------------------------------------

    def _check(self, other: "MultiIndex") -> None:
        if len(self) != len(other):
            raise ValueError(
                f"dimension mismatch: {len(self)} vs {len(other)} base directions"
            )

    def union(self, other: "MultiIndex") -> "MultiIndex":
        self._check(other)
        return MultiIndex(a + b for a, b in zip(self, other))

    def add(self, lam: int) -> "MultiIndex":
        """Append one more derivative along ``lam``."""
        counts = list(self)
        counts[lam] += 1
        return MultiIndex(counts)

    def difference(self, other: "MultiIndex") -> "MultiIndex":
        """``self - other``; requires ``other <= self`` componentwise."""
        self._check(other)
        if not other.divides(self):
            raise ValueError(f"{other} is not a sub-multi-index of {self}")
        return MultiIndex(a - b for a, b in zip(self, other))

    def divides(self, other: "MultiIndex") -> bool:
        """True when ``self`` is a sub-multiset of ``other``."""
        return all(a <= b for a, b in zip(self, other))

    def submultiindices(self) -> Iterator["MultiIndex"]:
        """All ``rho <= self`` componentwise, in no particular order."""
        for counts in itertools.product(*(range(c + 1) for c in self)):
            yield MultiIndex(counts)

    # -- ordering ---------------------------------------------------------

    @property
    def _key(self):
        return (sum(self), tuple(-c for c in self))

    def __lt__(self, other):
        return self._key < other._key

    def __le__(self, other):
        return self._key <= other._key

    def __gt__(self, other):
        return self._key > other._key

    def __ge__(self, other):
        return self._key >= other._key

    # tuple.__add__ would concatenate; keep "+" meaning union.
    def __add__(self, other):
        return self.union(other)

    __hash__ = tuple.__hash__
    __eq__ = tuple.__eq__
    __ne__ = tuple.__ne__

    def __repr__(self) -> str:
        return f"MultiIndex({tuple(self)!r})"

    def to_json(self) -> list[int]:
        return list(self)

    @classmethod
    def from_json(cls, data) -> "MultiIndex":
        return cls(data)

    def text(self, names: Sequence[str] | None = None) -> str:
        """Diagnostic rendering such as ``x1^2 x2``; ``1`` for the empty index."""
        if names is None:
            names = [f"x{k + 1}" for k in range(len(self))]
        parts = []
        for name, c in zip(names, self):
            if c == 1:
                parts.append(name)
            elif c > 1:
                parts.append(f"{name}^{c}")
        return " ".join(parts) if parts else "1"


def union(a: MultiIndex, b: MultiIndex) -> MultiIndex:
    return a.union(b)


def choose(a: MultiIndex, b: MultiIndex) -> int:
    """Multinomial count of ways ``b`` sits inside ``a``: prod_l C(a_l, b_l).

    Returns 0 when ``b`` is not a sub-multi-index of ``a``.  This is the
    coefficient of the Leibniz rule ``D_a(fg) = sum_b choose(a,b) D_b f D_{a-b} g``.
    """
    if len(a) != len(b):
        raise ValueError(f"dimension mismatch: {len(a)} vs {len(b)}")
    result = 1
    for x, y in zip(a, b):
        if y > x:
            return 0
        result *= comb(x, y)
    return result


def enumerate_multiindices(n: int, max_order: int) -> list[MultiIndex]:
    """All multi-indices over ``n`` directions with order at most ``max_order``.

    The output is sorted in graded lexicographic order.
    """
    if n < 1:
        raise ValueError("n must be at least 1")
    if max_order < 0:
        raise ValueError("max_order must be non-negative")
    out = []
    for order in range(max_order + 1):
        level = []
        for combo in itertools.combinations_with_replacement(range(n), order):
            level.append(MultiIndex.from_word(n, combo))
        level.sort()
        out.extend(level)
    return out
