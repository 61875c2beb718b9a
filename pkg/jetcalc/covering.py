"""
Finite-dimensional coverings over a PDE system.

A covering adds fiber coordinates w_1..w_r and vertical fields V_i, giving
extended derivatives D̂_i = D̄_i + V_i. Flatness of the extended distribution
(the zero-curvature condition) is checked coefficientwise; nonlocal
symmetries are checked against the extended determining equations; the
Wahlquist–Estabrook fields over KdV are assembled from concrete vertical
field representations.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from typing import Mapping, Sequence

from jetcalc.calculus import DerivativeTable, GeneratingFunction
from jetcalc.context import JetContext
from jetcalc.equation import PdeSystem
from jetcalc.errors import CoveringError, InvalidContextError, ShapeMismatchError
from jetcalc.expr import Coordinate, JetExpr, apply_derivation
from jetcalc.models import (
    FiberResidual,
    FlatnessEntry,
    FlatnessReport,
    NonlocalReport,
    RelationEntry,
    WeAssemblyReport,
)
from jetcalc.operators import system_linearization
from jetcalc.parser import parse, render

logger = logging.getLogger(__name__)


# ── Vertical fields ───────────────────────────────────────────────────────────


@dataclass(frozen=True)
class VerticalField:
    """Σ_a coefficient_a · ∂/∂w_a over r fiber coordinates."""

    coefficients: tuple[JetExpr, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "coefficients", tuple(self.coefficients))

    @classmethod
    def zero(cls, r: int) -> VerticalField:
        return cls((JetExpr.zero(),) * r)

    @classmethod
    def basis(cls, r: int, a: int) -> VerticalField:
        """∂/∂w_a"""
        return cls(tuple(JetExpr.one() if b == a else JetExpr.zero() for b in range(r)))

    @classmethod
    def parse(cls, table: Mapping[str, str], ctx: JetContext) -> VerticalField:
        """From ``{fiber name: coefficient text}``; missing coordinates get 0."""
        unknown = set(table) - set(ctx.fiber)
        if unknown:
            raise CoveringError(f"unknown fiber coordinates {sorted(unknown)}")
        return cls(tuple(parse(table[w], ctx) if w in table else JetExpr.zero() for w in ctx.fiber))

    @property
    def r(self) -> int:
        return len(self.coefficients)

    @property
    def is_zero(self) -> bool:
        return all(c.is_zero for c in self.coefficients)

    def apply(self, e: JetExpr) -> JetExpr:
        """V(e) = Σ_a coefficient_a · ∂e/∂w_a."""
        return apply_derivation(
            e,
            lambda c: self.coefficients[c.index] if c.is_nonlocal and c.index < self.r else None,
        )

    def bracket(self, other: VerticalField) -> VerticalField:
        """[X, Y]_a = X(g_a) − Y(f_a)."""
        self._check(other)
        return VerticalField(
            tuple(self.apply(g) - other.apply(f) for f, g in zip(self.coefficients, other.coefficients))
        )

    def __add__(self, other: VerticalField) -> VerticalField:
        self._check(other)
        return VerticalField(tuple(f + g for f, g in zip(self.coefficients, other.coefficients)))

    def __sub__(self, other: VerticalField) -> VerticalField:
        return self + other.scale(-1)

    def scale(self, factor: JetExpr | int | Fraction) -> VerticalField:
        return VerticalField(tuple(f * factor for f in self.coefficients))

    def map(self, fn) -> VerticalField:
        return VerticalField(tuple(fn(f) for f in self.coefficients))

    def _check(self, other: VerticalField) -> None:
        if self.r != other.r:
            raise CoveringError(f"vertical fields live on different fibers ({self.r} vs {other.r} coordinates)")

    def render(self, ctx: JetContext) -> list[str]:
        return [f"{w}: {render(c, ctx)}" for w, c in zip(ctx.fiber, self.coefficients)]


def vertical_bracket(x: VerticalField, y: VerticalField) -> VerticalField:
    return x.bracket(y)


# ── Coverings ─────────────────────────────────────────────────────────────────


class Covering:
    """Fiber coordinates and one vertical field per independent variable over ``base``."""

    def __init__(self, base: PdeSystem, fiber: Sequence[str], fields: Sequence[VerticalField]):
        self.base = base
        try:
            self.ctx = base.ctx.with_fiber(tuple(fiber))
        except InvalidContextError as exc:
            raise CoveringError(str(exc)) from exc
        self.fields: tuple[VerticalField, ...] = tuple(fields)
        self._validate()
        logger.info("covering ready: %d fiber coordinate(s) over %s", self.r, "; ".join(base.render()))

    @classmethod
    def from_tables(cls, base: PdeSystem, fiber: Sequence[str], tables: Mapping[str, Mapping[str, str]]) -> Covering:
        """``tables[x][w]`` is the text of the w-coefficient of V_x."""
        try:
            ctx = base.ctx.with_fiber(tuple(fiber))
        except InvalidContextError as exc:
            raise CoveringError(str(exc)) from exc
        unknown = set(tables) - set(ctx.independent)
        if unknown:
            raise CoveringError(f"vertical fields for undeclared variables {sorted(unknown)}")
        fields = [VerticalField.parse(tables.get(x, {}), ctx) for x in ctx.independent]
        return cls(base, fiber, fields)

    @property
    def r(self) -> int:
        return self.ctx.r

    def _validate(self) -> None:
        if len(self.fields) != self.ctx.n:
            raise CoveringError(f"need {self.ctx.n} vertical fields, got {len(self.fields)}")
        for i, field in enumerate(self.fields):
            if field.r != self.r:
                raise CoveringError(
                    f"V_{self.ctx.independent[i]} has {field.r} coefficients for {self.r} fiber coordinates"
                )
            for c in (c for e in field.coefficients for c in e.coordinates()):
                if c.is_nonlocal and c.index >= self.r:
                    raise CoveringError(f"V_{self.ctx.independent[i]} mentions an undeclared fiber coordinate")
                if c.is_jet and not self.base.is_internal(c):
                    raise CoveringError(
                        f"V_{self.ctx.independent[i]} mentions {self.ctx.name_of(c)}, "
                        "which is not an internal coordinate"
                    )

    def extended_total_derivative(self, e: JetExpr, i: int) -> JetExpr:
        """D̂_i(e) = D̄_i(e) + V_i(e)."""
        return self.base.reduce(self.base.restricted_total_derivative(e, i) + self.fields[i].apply(e))

    def render(self) -> list[str]:
        lines = []
        for x, field in zip(self.ctx.independent, self.fields):
            lines.extend(f"V_{x}[{w}] = {render(c, self.ctx)}" for w, c in zip(self.ctx.fiber, field.coefficients))
        return lines


def extended_total_derivative(covering: Covering, e: JetExpr, i: int) -> JetExpr:
    return covering.extended_total_derivative(e, i)


@dataclass(frozen=True)
class FlatnessResidual:
    i: int
    j: int
    a: int
    residual: JetExpr


def check_flatness(covering: Covering) -> list[FlatnessResidual]:
    """One residual D̂_i(V_j^a) − D̂_j(V_i^a) per pair i < j and fiber coordinate a."""
    out = []
    n = covering.ctx.n
    for i in range(n):
        for j in range(i + 1, n):
            for a in range(covering.r):
                residual = covering.extended_total_derivative(covering.fields[j].coefficients[a], i) - (
                    covering.extended_total_derivative(covering.fields[i].coefficients[a], j)
                )
                out.append(FlatnessResidual(i, j, a, residual))
    logger.info("flatness: %d residual(s), %d nonzero", len(out), sum(1 for r in out if not r.residual.is_zero))
    return out


def flatness_report(covering: Covering) -> FlatnessReport:
    ctx = covering.ctx
    residuals = check_flatness(covering)
    return FlatnessReport(
        flat=all(r.residual.is_zero for r in residuals),
        residuals=[
            FlatnessEntry(
                i=ctx.independent[r.i],
                j=ctx.independent[r.j],
                fiber=ctx.fiber[r.a],
                residual=render(r.residual, ctx),
            )
            for r in residuals
        ],
    )


# ── Nonlocal symmetries ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class NonlocalResidual:
    determining: tuple[JetExpr, ...]
    # (independent index, fiber index) -> residual
    fiber: tuple[tuple[int, int, JetExpr], ...]

    @property
    def is_zero(self) -> bool:
        return all(e.is_zero for e in self.determining) and all(e.is_zero for _, _, e in self.fiber)

    def report(self, ctx: JetContext) -> NonlocalReport:
        return NonlocalReport(
            determining=[render(e, ctx) for e in self.determining],
            fiber=[
                FiberResidual(variable=ctx.independent[i], fiber=ctx.fiber[a], residual=render(e, ctx))
                for i, a, e in self.fiber
            ],
            symmetry=self.is_zero,
        )


def nonlocal_symmetry_residual(
    covering: Covering,
    phi: GeneratingFunction,
    psi: Sequence[JetExpr],
) -> NonlocalResidual:
    """Extended determining residual ℓ̂_F(φ) and the fiber compatibility residuals."""
    base = covering.base
    phi.check_length(base.ctx.m)
    if len(psi) != covering.r:
        raise ShapeMismatchError(f"ψ has {len(psi)} components, the covering has {covering.r} fiber coordinates")
    phi = phi.map(base.reduce)
    psi = [base.reduce(p) for p in psi]
    derivative = covering.extended_total_derivative
    determining = system_linearization(base).apply(phi, derivative=derivative)

    table = DerivativeTable(phi, derivative, covering.ctx.n)

    def lifted(c: Coordinate) -> JetExpr | None:
        if c.is_jet:
            return table.get(c.index, c.sigma)
        if c.is_nonlocal:
            return psi[c.index]
        return None

    fiber = []
    for i, field in enumerate(covering.fields):
        for a, coefficient in enumerate(field.coefficients):
            residual = derivative(psi[a], i) - apply_derivation(coefficient, lifted)
            fiber.append((i, a, base.reduce(residual)))
    return NonlocalResidual(tuple(determining), tuple(fiber))


# ── Wahlquist–Estabrook assembly over KdV ─────────────────────────────────────

KDV_EQUATION = "u_t = u*u_x + u_xxx"


@dataclass(frozen=True)
class Representation:
    """Concrete vertical fields A, B, C, D on a common fiber."""

    fiber: tuple[str, ...]
    A: VerticalField
    B: VerticalField
    C: VerticalField
    D: VerticalField

    def __post_init__(self) -> None:
        object.__setattr__(self, "fiber", tuple(self.fiber))
        r = len(self.fiber)
        for name in "ABCD":
            if getattr(self, name).r != r:
                raise CoveringError(f"field {name} does not live on the fiber {self.fiber}")
            for e in getattr(self, name).coefficients:
                if any(not c.is_nonlocal for c in e.coordinates()):
                    raise CoveringError(f"field {name} must depend on fiber coordinates only")

    @classmethod
    def parse(cls, fiber: Sequence[str], tables: Mapping[str, Mapping[str, str]]) -> Representation:
        ctx = JetContext(("x", "t"), ("u",), tuple(fiber))
        fields = {name: VerticalField.parse(tables.get(name, {}), ctx) for name in "ABCD"}
        return cls(tuple(fiber), **fields)


def we_relations(rep: Representation) -> list[tuple[str, VerticalField]]:
    """The six commutation relations; each field must vanish."""
    A, B, C, D = rep.A, rep.B, rep.C, rep.D
    CB = C.bracket(B)
    return [
        ("[A,B]", A.bracket(B)),
        ("[A,C]", A.bracket(C)),
        ("[C,D]", C.bracket(D)),
        ("[B,D] + [C,[C,[C,B]]]", B.bracket(D) + C.bracket(C.bracket(CB))),
        ("[B,[B,[B,C]]]", B.bracket(B.bracket(B.bracket(C)))),
        ("[A,D] + 3/2*[B,[C,[C,B]]]", A.bracket(D) + B.bracket(C.bracket(CB)).scale(Fraction(3, 2))),
    ]


def we_ansatz(rep: Representation, *, literal: bool = False) -> Covering:
    """KdV covering with V_x = u²A + uB + C and the matching V_t.

    The constant-in-u part of V_t is ½(u²B + [B,[C,B]]) unless ``literal``
    selects the printed ½(B + [B,[C,B]]); only the former is flat in the
    abelian specialization B = ∂/∂w.
    """
    ctx = JetContext(("x", "t"), ("u",), rep.fiber)
    base = PdeSystem.from_strings(JetContext(("x", "t"), ("u",)), [KDV_EQUATION])
    u = JetExpr.coordinate(ctx.u(0))
    u1 = JetExpr.coordinate(ctx.lookup("u_x"))
    u2 = JetExpr.coordinate(ctx.lookup("u_xx"))
    A, B, C, D = rep.A, rep.B, rep.C, rep.D
    BC, CB = B.bracket(C), C.bracket(B)
    half = Fraction(1, 2)

    v_x = A.scale(u ** 2) + B.scale(u) + C
    quadratic = B if literal else B.scale(u ** 2)
    v_t = (
        A.scale(2 * u * u2)
        + B.scale(u2)
        - A.scale(u1 ** 2)
        + BC.scale(u1)
        + A.scale(Fraction(2, 3) * u ** 3)
        + (quadratic + B.bracket(CB)).scale(half)
        + C.bracket(CB).scale(u)
        + D
    )
    if literal:
        logger.warning("assembling the literal reading ½(B + [B,[C,B]]); expect non-flatness when B ≠ 0")
    return Covering(base, rep.fiber, [v_x, v_t])


def we_report(rep: Representation, *, literal: bool = False) -> WeAssemblyReport:
    covering = we_ansatz(rep, literal=literal)
    ctx = covering.ctx
    relations = [
        RelationEntry(relation=name, residual=field.render(ctx), holds=field.is_zero)
        for name, field in we_relations(rep)
    ]
    return WeAssemblyReport(
        reading="literal" if literal else "corrected",
        v_x=covering.fields[0].render(ctx),
        v_t=covering.fields[1].render(ctx),
        relations=relations,
        relations_hold=all(r.holds for r in relations),
        flatness=flatness_report(covering),
    )
