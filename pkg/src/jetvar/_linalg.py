"""Exact sparse linear solve over the rationals.

Rows are dicts ``column -> coefficient``.  Only what the homotopy correction
needs: one particular solution (free variables set to zero) or ``None``.
"""

from __future__ import annotations

from fractions import Fraction
from typing import Hashable, Iterable, Mapping


def solve_sparse(
    rows: Iterable[tuple[Mapping[Hashable, object], object]],
) -> dict[Hashable, Fraction] | None:
    pivots: list[tuple[Hashable, dict, Fraction]] = []
    pivot_cols: dict[Hashable, int] = {}
    for coeffs, rhs in rows:
        row = {c: Fraction(v) for c, v in coeffs.items() if v}
        rhs = Fraction(rhs)
        # pivots are applied in creation order; a later pivot row never
        # contains an earlier pivot column, so one pass reduces fully
        for col, prow, prhs in pivots:
            f = row.get(col)
            if not f:
                continue
            for c, v in prow.items():
                nv = row.get(c, 0) - f * v
                if nv:
                    row[c] = nv
                else:
                    row.pop(c, None)
            rhs -= f * prhs
        if not row:
            if rhs:
                return None
            continue
        col = min(row, key=repr)
        piv = row[col]
        row = {c: v / piv for c, v in row.items()}
        pivots.append((col, row, rhs / piv))
        pivot_cols[col] = len(pivots) - 1

    solution: dict[Hashable, Fraction] = {}
    for col, prow, prhs in reversed(pivots):
        val = prhs
        for c, v in prow.items():
            if c != col:
                val -= v * solution.get(c, 0)
        solution[col] = val
    return solution
