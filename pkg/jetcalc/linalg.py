"""
Exact linear algebra over ℚ on sparse rows, backed by sympy's DomainMatrix.
"""

from __future__ import annotations

import logging
from fractions import Fraction
from typing import Mapping, Sequence

from sympy import QQ
from sympy.polys.matrices import DomainMatrix

logger = logging.getLogger(__name__)

SparseRow = Mapping[int, Fraction]


def _domain_matrix(rows: Sequence[SparseRow], ncols: int) -> DomainMatrix:
    data = {
        r: {c: QQ(q.numerator, q.denominator) for c, q in row.items() if q}
        for r, row in enumerate(rows)
    }
    return DomainMatrix({r: cols for r, cols in data.items() if cols}, (len(rows), ncols), QQ)


def _to_fractions(matrix: DomainMatrix) -> list[list[Fraction]]:
    dense = matrix.to_Matrix()
    return [
        [Fraction(int(dense[r, c].p), int(dense[r, c].q)) for c in range(dense.cols)]
        for r in range(dense.rows)
    ]


def rref(rows: Sequence[SparseRow], ncols: int) -> tuple[list[list[Fraction]], tuple[int, ...]]:
    """Reduced row echelon form and pivot columns (pivoting left to right)."""
    if not rows or ncols == 0:
        return [], ()
    reduced, pivots = _domain_matrix(rows, ncols).rref()
    return _to_fractions(reduced)[: len(pivots)], tuple(pivots)


def nullspace(rows: Sequence[SparseRow], ncols: int) -> list[list[Fraction]]:
    """Canonical basis of {v : A v = 0}.

    The basis is itself in reduced row echelon form, so it depends only on
    the solution space and the column order, never on how rows were listed.
    """
    if ncols == 0:
        return []
    reduced, pivots = rref(rows, ncols)
    pivot_set = set(pivots)
    basis: list[dict[int, Fraction]] = []
    for free in range(ncols):
        if free in pivot_set:
            continue
        vector = {free: Fraction(1)}
        for row, pivot in zip(reduced, pivots):
            if row[free]:
                vector[pivot] = -row[free]
        basis.append(vector)
    logger.debug("nullspace: %d columns, rank %d, dimension %d", ncols, len(pivots), len(basis))
    if not basis:
        return []
    canonical, _ = rref(basis, ncols)
    return canonical


def rank(rows: Sequence[SparseRow], ncols: int) -> int:
    if not rows or ncols == 0:
        return 0
    return _domain_matrix(rows, ncols).rank()
