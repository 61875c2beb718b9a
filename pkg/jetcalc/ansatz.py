"""
Finite polynomial ansatz for linear determining equations on E∞.

Unknown generating functions are written as Σ c_α M_α over a monomial
family; the residual is linear in the c_α and its coefficients with respect
to the internal coordinates (treated as algebraically independent) give an
exact linear system over ℚ.
"""

from __future__ import annotations

import itertools
import logging
import math
from fractions import Fraction
from typing import Callable, Sequence

from pydantic import BaseModel, ConfigDict, Field

from config.settings import get_settings
from jetcalc.calculus import GeneratingFunction
from jetcalc.equation import PdeSystem
from jetcalc.errors import AnsatzLimitError, InvalidSystemError
from jetcalc.expr import Coordinate, JetExpr, Monomial, monomial_key
from jetcalc.linalg import nullspace, rank

logger = logging.getLogger(__name__)

Residual = Callable[[GeneratingFunction], Sequence[JetExpr]]


class AnsatzSpec(BaseModel):
    """Bounds of the monomial family: jet order, jet degree, explicit x-degree."""

    model_config = ConfigDict(frozen=True)

    order: int = Field(..., ge=0, description="Maximum jet order k of ansatz coordinates")
    degree: int = Field(..., ge=1, description="Maximum total degree d in jet coordinates")
    xt_degree: int = Field(0, ge=0, description="Maximum degree in the independent variables (0 = none)")


def _monomials(coords: Sequence[Coordinate], max_degree: int) -> list[JetExpr]:
    out = []
    for degree in range(max_degree + 1):
        for combo in itertools.combinations_with_replacement(coords, degree):
            e = JetExpr.one()
            for c in combo:
                e = e * JetExpr.coordinate(c)
            out.append(e)
    return out


def _leading_monomial(e: JetExpr) -> Monomial:
    return next(iter(e.num_terms))


def ansatz_size(system: PdeSystem, spec: AnsatzSpec) -> int:
    jets = len(system.internal_coordinates(spec.order))
    n = system.ctx.n
    return system.ctx.m * math.comb(jets + spec.degree, spec.degree) * math.comb(n + spec.xt_degree, spec.xt_degree)


def ansatz_columns(system: PdeSystem, spec: AnsatzSpec) -> list[tuple[int, JetExpr]]:
    """(component, monomial) pairs, component-major and descending within a component."""
    jets = _monomials(system.internal_coordinates(spec.order), spec.degree)
    xs = _monomials([Coordinate.independent(i) for i in range(system.ctx.n)], spec.xt_degree)
    products = [j * x for j in jets for x in xs]
    products.sort(key=lambda e: monomial_key(_leading_monomial(e)), reverse=True)
    return [(j, M) for j in range(system.ctx.m) for M in products]


def solve_linear_ansatz(
    system: PdeSystem,
    spec: AnsatzSpec,
    residual: Residual,
    *,
    limit: int | None = None,
) -> list[GeneratingFunction]:
    """Canonical basis of the ansatz solutions of ``residual(φ) = 0``."""
    limit = get_settings().ansatz_limit if limit is None else limit
    size = ansatz_size(system, spec)
    if size > limit:
        raise AnsatzLimitError(size, limit)
    columns = ansatz_columns(system, spec)
    logger.info("Ansatz: %d unknowns (order %d, degree %d, xt-degree %d)",
                len(columns), spec.order, spec.degree, spec.xt_degree)

    m = system.ctx.m
    row_index: dict[tuple[int, Monomial], int] = {}
    rows: list[dict[int, Fraction]] = []
    for col, (j, M) in enumerate(columns):
        components = [JetExpr.zero()] * m
        components[j] = M
        for s, r in enumerate(residual(GeneratingFunction(tuple(components)))):
            if r.is_zero:
                continue
            if not r.is_polynomial:
                raise InvalidSystemError(
                    "the determining equations have rational coefficients; "
                    "the polynomial ansatz cannot separate them"
                )
            for mono, q in r.num_terms.items():
                key = (s, mono)
                if key not in row_index:
                    row_index[key] = len(rows)
                    rows.append({})
                rows[row_index[key]][col] = q

    vectors = nullspace(rows, len(columns))
    logger.info("Ansatz: %d equations, solution space of dimension %d", len(rows), len(vectors))
    return [_combine(columns, v, m) for v in vectors]


def _combine(columns: Sequence[tuple[int, JetExpr]], vector: Sequence[Fraction], m: int) -> GeneratingFunction:
    components = [JetExpr.zero()] * m
    for (j, M), q in zip(columns, vector):
        if q:
            components[j] = components[j] + M * q
    return GeneratingFunction(tuple(components))


def span_contains(basis: Sequence[GeneratingFunction], candidates: Sequence[GeneratingFunction]) -> bool:
    """True iff every candidate lies in the ℚ-span of ``basis``."""
    index: dict[tuple[int, Monomial], int] = {}

    def row(gf: GeneratingFunction) -> dict[int, Fraction]:
        out = {}
        for j, component in enumerate(gf):
            if not component.is_polynomial:
                raise ValueError("span_contains() needs polynomial generating functions")
            for mono, q in component.num_terms.items():
                out[index.setdefault((j, mono), len(index))] = q
        return out

    base_rows = [row(gf) for gf in basis]
    extra_rows = [row(gf) for gf in candidates]
    ncols = len(index)
    return rank(base_rows + extra_rows, ncols) == rank(base_rows, ncols)
