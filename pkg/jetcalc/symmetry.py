"""
Higher symmetries of a PDE system.

Residuals of the determining equation ℓ̄_F(φ) = 0, its finite-ansatz
solution, Jacobi brackets, point/contact classification, invariant-solution
systems, formal integration D_x⁻¹ and recursion operators.
"""

from __future__ import annotations

import enum
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Sequence

from jetcalc.ansatz import AnsatzSpec, solve_linear_ansatz
from jetcalc.calculus import (
    DerivativeTable,
    GeneratingFunction,
    horizontal_derivative,
    total_derivative,
)
from jetcalc.context import JetContext
from jetcalc.equation import PdeSystem
from jetcalc.errors import (
    InvalidSystemError,
    NonlocalCoordinateError,
    NotExactError,
    ShapeMismatchError,
)
from jetcalc.expr import Coordinate, JetExpr, MultiIndex, apply_derivation
from jetcalc.models import InvariantSystemReport
from jetcalc.operators import CDiffOp, system_linearization
from jetcalc.parser import parse, render

logger = logging.getLogger(__name__)


# ── Determining equation ──────────────────────────────────────────────────────


@lru_cache(maxsize=32)
def _linearization(system: PdeSystem) -> CDiffOp:
    return system_linearization(system)


def symmetry_residual(system: PdeSystem, phi: GeneratingFunction) -> list[JetExpr]:
    """ℓ̄_F(φ); φ is a higher symmetry iff every component is zero."""
    phi.check_length(system.ctx.m)
    return _linearization(system).apply(phi.map(system.reduce))


def solve_determining(system: PdeSystem, spec: AnsatzSpec, *, limit: int | None = None) -> list[GeneratingFunction]:
    """Basis of the symmetries inside the polynomial ansatz ``spec``."""
    return solve_linear_ansatz(system, spec, lambda phi: symmetry_residual(system, phi), limit=limit)


# ── Jacobi bracket ────────────────────────────────────────────────────────────


def _evolutionary(phi: GeneratingFunction, e: JetExpr, derivative) -> JetExpr:
    jets = [c for c in e.coordinates() if c.is_jet]
    if not jets:
        return JetExpr.zero()
    table = DerivativeTable(phi, derivative, len(jets[0].sigma))

    def image(c: Coordinate) -> JetExpr | None:
        if not c.is_jet:
            return None
        if c.index >= len(phi):
            raise ShapeMismatchError(f"generating function has no component for dependent index {c.index}")
        return table.get(c.index, c.sigma)

    return apply_derivation(e, image)


def jacobi_bracket(
    phi: GeneratingFunction,
    psi: GeneratingFunction,
    system: PdeSystem | None = None,
) -> GeneratingFunction:
    """{φ, ψ} = Э_φ(ψ) − Э_ψ(φ); with ``system`` both sides are taken on E∞."""
    phi.check_length(len(psi))
    if any(e.has_nonlocal() for e in (*phi, *psi)):
        raise NonlocalCoordinateError("jacobi_bracket() is defined on jets, not coverings")
    if system is None:
        derivative, finish = total_derivative, (lambda e: e)
    else:
        derivative, finish = system.restricted_total_derivative, system.reduce
        phi, psi = phi.map(system.reduce), psi.map(system.reduce)
    return GeneratingFunction(
        tuple(
            finish(_evolutionary(phi, b, derivative) - _evolutionary(psi, a, derivative))
            for a, b in zip(phi, psi)
        )
    )


# ── Classification ────────────────────────────────────────────────────────────


class SymmetryKind(str, enum.Enum):
    POINT = "Point"
    CONTACT = "Contact"
    HIGHER = "Higher"


@dataclass(frozen=True)
class PointGenerator:
    """Σ a_i ∂/∂x_i + Σ b^j ∂/∂u^j, with φ^j = b^j − Σ a_i u^j_{1_i}."""

    a: tuple[JetExpr, ...]
    b: tuple[JetExpr, ...]

    def render(self, ctx: JetContext) -> str:
        parts = []
        for coefficient, name in [*zip(self.a, ctx.independent), *zip(self.b, ctx.dependent)]:
            if coefficient.is_zero:
                continue
            text = render(coefficient, ctx)
            if coefficient == 1:
                parts.append(f"d/d{name}")
            elif coefficient == -1:
                parts.append(f"-d/d{name}")
            elif coefficient.is_polynomial and len(coefficient.num_terms) == 1:
                parts.append(f"{text}*d/d{name}")
            else:
                parts.append(f"({text})*d/d{name}")
        return " + ".join(parts).replace("+ -", "- ") if parts else "0"


@dataclass(frozen=True)
class Classification:
    kind: SymmetryKind
    generator: PointGenerator | None = None


def _affine_split(e: JetExpr, firsts: set[Coordinate]) -> tuple[JetExpr, dict[Coordinate, JetExpr]] | None:
    """e = b + Σ coef_c · c over first-order c, coefficients of order 0; None if not affine."""
    if any(c in firsts for c in e.denominator().coordinates()):
        return None
    constant: dict = {}
    linear: dict[Coordinate, dict] = {}
    for mono, q in e.num_terms.items():
        hits = [(c, p) for c, p in mono if c in firsts]
        if not hits:
            constant[mono] = q
            continue
        if len(hits) > 1 or hits[0][1] != 1:
            return None
        c = hits[0][0]
        rest = tuple(cp for cp in mono if cp[0] != c)
        linear.setdefault(c, {})[rest] = q
    den = e.denominator()
    return (
        JetExpr(constant) / den,
        {c: JetExpr(terms) / den for c, terms in linear.items()},
    )


def classify(phi: GeneratingFunction, ctx: JetContext) -> Classification:
    """Point, Contact (m = 1 only) or Higher, with the point field when Point."""
    phi.check_length(ctx.m)
    coords = {c for e in phi for c in e.coordinates()}
    if any(c.is_nonlocal for c in coords):
        return Classification(SymmetryKind.HIGHER)
    if any(c.is_jet and c.order > 1 for c in coords):
        return Classification(SymmetryKind.HIGHER)

    n = ctx.n
    firsts = {ctx.u(j, MultiIndex.unit(n, i)) for j in range(ctx.m) for i in range(n)}
    a: list[JetExpr] | None = None
    b: list[JetExpr] = []
    point = True
    for j, e in enumerate(phi):
        split = _affine_split(e, firsts)
        if split is None:
            point = False
            break
        constant, linear = split
        if any(c.index != j for c in linear):
            point = False
            break
        row = [-linear.get(ctx.u(j, MultiIndex.unit(n, i)), JetExpr.zero()) for i in range(n)]
        if a is None:
            a = row
        elif a != row:
            point = False
            break
        b.append(constant)
    if point and a is not None:
        return Classification(SymmetryKind.POINT, PointGenerator(tuple(a), tuple(b)))
    if ctx.m == 1:
        return Classification(SymmetryKind.CONTACT)
    return Classification(SymmetryKind.HIGHER)


# ── Invariant solutions ───────────────────────────────────────────────────────


def _flow_parameter(ctx: JetContext) -> str:
    taken = set(ctx.independent) | set(ctx.dependent) | set(ctx.fiber)
    candidate, k = "s", 0
    while candidate in taken:
        k += 1
        candidate = f"s{k}"
    return candidate


def invariant_system(system: PdeSystem, phis: Sequence[GeneratingFunction]) -> InvariantSystemReport:
    """The joint system {F = 0, φ = 0, …} plus trajectory equations and residuals."""
    ctx = system.ctx
    s = _flow_parameter(ctx)
    constraints, trajectories, residuals = [], [], []
    for phi in phis:
        phi.check_length(ctx.m)
        constraints.extend(f"{render(component, ctx)} = 0" for component in phi)
        trajectories.extend(
            f"{name}_{s} = {render(component, ctx)}" for name, component in zip(ctx.dependent, phi)
        )
        residuals.append([render(r, ctx) for r in symmetry_residual(system, phi)])
    return InvariantSystemReport(
        independent=list(ctx.independent),
        dependent=list(ctx.dependent),
        equations=system.render(),
        constraints=constraints,
        flow_parameter=s,
        trajectories=trajectories,
        residuals=residuals,
    )


# ── Formal integration ────────────────────────────────────────────────────────


def _antiderivative(e: JetExpr, c: Coordinate) -> JetExpr:
    """∫ e dc for a polynomial e."""
    terms: dict = {}
    for mono, q in e.num_terms.items():
        power = next((p for d, p in mono if d == c), 0)
        rest = [(d, p) for d, p in mono if d != c]
        raised = tuple(sorted([*rest, (c, power + 1)], key=lambda dp: dp[0].sort_key))
        terms[raised] = q / (power + 1)
    return JetExpr(terms)


def formal_integrate(e: JetExpr, i: int = 0) -> JetExpr:
    """p with D_i(p) = e, by descent on the highest x_i-derivative.

    Supports a single dependent variable differentiated in x_i only; other
    independent variables act as parameters.
    """
    if e.has_nonlocal():
        raise NonlocalCoordinateError("formal_integrate() is defined on jets")
    if not e.is_polynomial:
        raise NotExactError(e)
    for c in e.coordinates():
        if c.is_jet and (c.index != 0 or c.sigma.order != c.sigma[i]):
            raise ShapeMismatchError(
                "formal integration needs one dependent variable differentiated in the integration variable only"
            )
    x = Coordinate.independent(i)
    result = JetExpr.zero()
    remaining = e
    while not remaining.is_zero:
        jets = [c for c in remaining.coordinates() if c.is_jet]
        if not jets:
            # functions of the independent variables integrate directly
            result = result + _antiderivative(remaining, x)
            break
        top = max(jets, key=lambda c: c.order)
        if top.order == 0 or remaining.degree_in(top) != 1:
            raise NotExactError(e, remaining)
        coefficient = remaining.collect(top)[1]
        lower = Coordinate.jet(0, top.sigma.bump(i, -1))
        step = _antiderivative(coefficient, lower)
        result = result + step
        remaining = remaining - horizontal_derivative(step, i)
        logger.debug("formal_integrate: eliminated order %d", top.order)
    return result


# ── Recursion operators ───────────────────────────────────────────────────────


@dataclass(frozen=True)
class DiffTerm:
    """coefficient · D_x^order"""

    coefficient: JetExpr
    order: int


@dataclass(frozen=True)
class IntegralTerm:
    """left · D_x⁻¹ ∘ right"""

    left: JetExpr
    right: JetExpr


_OPERATOR_TOKEN = re.compile(r"(?<![A-Za-z0-9_])(Dinv|D)(?:\s*\^\s*(\d+))?(?![A-Za-z0-9_])")


@dataclass(frozen=True)
class RecursionOperator:
    """Σ a_k D_x^k + Σ b · D_x⁻¹ ∘ c acting on scalar generating functions."""

    terms: tuple[DiffTerm | IntegralTerm, ...]
    variable: int = 0

    @classmethod
    def kdv(cls) -> RecursionOperator:
        """D_x² + 2/3·u + 1/3·u_x·D_x⁻¹ for u_t = u·u_x + u_xxx."""
        ctx = JetContext(("x", "t"), ("u",))
        return cls.parse(["D^2", "2/3*u", "1/3*u_x*Dinv"], ctx)

    @classmethod
    def parse(cls, lines: Sequence[str], ctx: JetContext, variable: int = 0) -> RecursionOperator:
        """One term per line: ``c*D^k``, ``c`` (multiplication) or ``b*Dinv*c``."""
        terms: list[DiffTerm | IntegralTerm] = []
        for raw in lines:
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            match = _OPERATOR_TOKEN.search(line)
            if match is None:
                terms.append(DiffTerm(parse(line, ctx), 0))
                continue
            left_text = line[: match.start()].strip().removesuffix("*").strip()
            right_text = line[match.end():].strip().removeprefix("*").strip()
            left = parse(left_text, ctx) if left_text else JetExpr.one()
            if match.group(1) == "Dinv":
                if match.group(2):
                    raise InvalidSystemError(f"recursion term {line!r}: Dinv takes no exponent")
                right = parse(right_text, ctx) if right_text else JetExpr.one()
                terms.append(IntegralTerm(left, right))
            else:
                if right_text:
                    raise InvalidSystemError(f"recursion term {line!r}: nothing may follow D^k")
                order = int(match.group(2)) if match.group(2) else 1
                terms.append(DiffTerm(left, order))
        if not terms:
            raise InvalidSystemError("recursion operator has no terms")
        return cls(tuple(terms), variable)

    def render(self, ctx: JetContext) -> list[str]:
        lines = []
        for term in self.terms:
            if isinstance(term, DiffTerm):
                coefficient = render(term.coefficient, ctx)
                if term.order == 0:
                    lines.append(coefficient)
                else:
                    d = "D" if term.order == 1 else f"D^{term.order}"
                    lines.append(d if term.coefficient == 1 else f"({coefficient})*{d}")
            else:
                lines.append(f"({render(term.left, ctx)})*Dinv*({render(term.right, ctx)})")
        return lines


def apply_recursion(
    operator: RecursionOperator,
    phi: GeneratingFunction,
    system: PdeSystem | None = None,
    steps: int = 1,
) -> GeneratingFunction:
    """R^steps(φ); D_x⁻¹ arguments must be exact."""
    if len(phi) != 1:
        raise ShapeMismatchError("recursion operators act on scalar generating functions")
    i = operator.variable
    if system is None:
        derivative, finish = total_derivative, (lambda e: e)
    else:
        derivative, finish = system.restricted_total_derivative, system.reduce
    current = finish(phi[0])
    for step in range(steps):
        derivatives = [current]
        parts = []
        for term in operator.terms:
            if isinstance(term, DiffTerm):
                while len(derivatives) <= term.order:
                    derivatives.append(derivative(derivatives[-1], i))
                parts.append(term.coefficient * derivatives[term.order])
            else:
                parts.append(term.left * formal_integrate(finish(term.right * current), i))
        current = finish(sum(parts, JetExpr.zero()))
        logger.info("recursion step %d done", step + 1)
    return GeneratingFunction((current,))


def point_symmetry_from_field(a: Sequence[JetExpr | int | Fraction], b: Sequence[JetExpr | int | Fraction], ctx: JetContext) -> GeneratingFunction:
    """φ^j = b^j − Σ a_i u^j_{1_i} for the field Σ a_i ∂/∂x_i + Σ b^j ∂/∂u^j."""
    as_expr = lambda v: v if isinstance(v, JetExpr) else JetExpr.constant(v)  # noqa: E731
    a = [as_expr(v) for v in a]
    b = [as_expr(v) for v in b]
    if len(a) != ctx.n or len(b) != ctx.m:
        raise ShapeMismatchError("field components do not match the declared variables")
    return GeneratingFunction(
        tuple(
            b[j] - sum((a[i] * JetExpr.coordinate(ctx.u(j, MultiIndex.unit(ctx.n, i))) for i in range(ctx.n)), JetExpr.zero())
            for j in range(ctx.m)
        )
    )
