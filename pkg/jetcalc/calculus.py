"""
Free jet-space operators: total derivatives D_i, iterated D_σ and
evolutionary derivations Э_φ.

The formally infinite sums are truncated to the coordinates that occur in
the argument, which is exact since ∂e/∂u^j_σ vanishes for the others.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Sequence

from jetcalc.context import JetContext
from jetcalc.errors import NonlocalCoordinateError, ShapeMismatchError
from jetcalc.expr import Coordinate, CoordinateKind, JetExpr, MultiIndex, apply_derivation
from jetcalc.parser import parse, render

logger = logging.getLogger(__name__)

Derivative = Callable[[JetExpr, int], JetExpr]


@dataclass(frozen=True)
class GeneratingFunction:
    """An m-tuple (φ¹, …, φᵐ) of expressions."""

    components: tuple[JetExpr, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "components", tuple(self.components))

    @classmethod
    def of(cls, *components: JetExpr | int) -> GeneratingFunction:
        return cls(tuple(c if isinstance(c, JetExpr) else JetExpr.constant(c) for c in components))

    @classmethod
    def parse(cls, texts: str | Sequence[str], ctx: JetContext) -> GeneratingFunction:
        """One expression per dependent variable; a single string may separate them with ';'."""
        if isinstance(texts, str):
            texts = texts.split(";")
        gf = cls(tuple(parse(t, ctx) for t in texts))
        gf.check_length(ctx.m)
        return gf

    @classmethod
    def zero(cls, m: int) -> GeneratingFunction:
        return cls((JetExpr.zero(),) * m)

    def __len__(self) -> int:
        return len(self.components)

    def __iter__(self) -> Iterator[JetExpr]:
        return iter(self.components)

    def __getitem__(self, j: int) -> JetExpr:
        return self.components[j]

    def __add__(self, other: GeneratingFunction) -> GeneratingFunction:
        self.check_length(len(other))
        return GeneratingFunction(tuple(a + b for a, b in zip(self, other)))

    def __sub__(self, other: GeneratingFunction) -> GeneratingFunction:
        self.check_length(len(other))
        return GeneratingFunction(tuple(a - b for a, b in zip(self, other)))

    def scale(self, q) -> GeneratingFunction:
        return GeneratingFunction(tuple(q * a for a in self))

    def map(self, fn: Callable[[JetExpr], JetExpr]) -> GeneratingFunction:
        return GeneratingFunction(tuple(fn(a) for a in self))

    @property
    def is_zero(self) -> bool:
        return all(a.is_zero for a in self)

    def check_length(self, m: int) -> None:
        if len(self.components) != m:
            raise ShapeMismatchError(
                f"generating function has {len(self.components)} components, expected {m}"
            )

    def render(self, ctx: JetContext) -> list[str]:
        return [render(a, ctx) for a in self]


# ── Total derivatives ─────────────────────────────────────────────────────────


@lru_cache(maxsize=None)
def _total_image(c: Coordinate, i: int) -> JetExpr | None:
    if c.kind is CoordinateKind.INDEPENDENT:
        return JetExpr.one() if c.index == i else None
    if c.kind is CoordinateKind.JET:
        return JetExpr.coordinate(Coordinate.jet(c.index, c.sigma.bump(i)))
    return None


def horizontal_derivative(e: JetExpr, i: int) -> JetExpr:
    """D_i with fiber coordinates held constant (the base part of D̂_i)."""
    return apply_derivation(e, lambda c: _total_image(c, i))


def total_derivative(e: JetExpr, i: int) -> JetExpr:
    """D_i(e) = ∂e/∂x_i + Σ u^j_{σ+1_i} ∂e/∂u^j_σ."""
    if e.has_nonlocal():
        raise NonlocalCoordinateError(
            "total_derivative() is defined on free jets; use the covering's extended derivative"
        )
    return horizontal_derivative(e, i)


def total_derivative_multi(e: JetExpr, sigma: MultiIndex) -> JetExpr:
    """D_σ = D_1^{σ_1} ⋯ D_n^{σ_n}."""
    for i in sigma.steps():
        e = total_derivative(e, i)
    return e


class DerivativeTable:
    """D_σ(φ^j) for a fixed tuple φ, built on demand from lower entries.

    ``derivative`` is D_i itself (free jets), D̄_i (restricted) or D̂_i
    (covering); the table is per call and never shared.
    """

    def __init__(self, components: Iterable[JetExpr], derivative: Derivative, n: int):
        self._derivative = derivative
        self._table: dict[tuple[int, MultiIndex], JetExpr] = {
            (j, MultiIndex.zero(n)): phi for j, phi in enumerate(components)
        }

    def get(self, j: int, sigma: MultiIndex) -> JetExpr:
        key = (j, sigma)
        hit = self._table.get(key)
        if hit is not None:
            return hit
        i = next(k for k, e in enumerate(sigma.exponents) if e > 0)
        value = self._derivative(self.get(j, sigma.bump(i, -1)), i)
        self._table[key] = value
        return value


def evolutionary_derivation(phi: GeneratingFunction, e: JetExpr) -> JetExpr:
    """Э_φ(e) = Σ D_σ(φ^j) ∂e/∂u^j_σ."""
    if e.has_nonlocal() or any(p.has_nonlocal() for p in phi):
        raise NonlocalCoordinateError("evolutionary_derivation() is defined on free jets")
    jets = [c for c in e.coordinates() if c.is_jet]
    if not jets:
        return JetExpr.zero()
    table = DerivativeTable(phi, total_derivative, len(jets[0].sigma))

    def image(c: Coordinate) -> JetExpr | None:
        if not c.is_jet:
            return None
        if c.index >= len(phi):
            raise ShapeMismatchError(f"generating function has no component for dependent index {c.index}")
        return table.get(c.index, c.sigma)

    return apply_derivation(e, image)
