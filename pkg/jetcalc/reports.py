"""
Report builders shared by the CLI and the HTTP service.

Each function takes already-loaded objects plus expression texts, runs one
library operation and returns the pydantic report that both front ends
serialize.
"""

from __future__ import annotations

import logging
from typing import Sequence

from jetcalc.ansatz import AnsatzSpec
from jetcalc.calculus import GeneratingFunction
from jetcalc.conservation import (
    ConservedCurrent,
    adjoint_residual,
    euler_operator,
    solve_adjoint_determining,
    verify_conserved_current,
)
from jetcalc.context import JetContext
from jetcalc.covering import Covering, nonlocal_symmetry_residual
from jetcalc.equation import PdeSystem
from jetcalc.errors import NotExactError
from jetcalc.expr import JetExpr
from jetcalc.models import (
    BasisReport,
    ClassificationReport,
    ComponentsReport,
    CurrentReport,
    ExpressionReport,
    NonlocalReport,
    OperatorEntry,
    OperatorReport,
    OperatorTerm,
    RecursionReport,
    ResidualReport,
)
from jetcalc.operators import CDiffOp, linearize
from jetcalc.parser import parse, render
from jetcalc.symmetry import (
    RecursionOperator,
    SymmetryKind,
    apply_recursion,
    classify,
    formal_integrate,
    jacobi_bracket,
    solve_determining,
    symmetry_residual,
)

logger = logging.getLogger(__name__)


def _rendered(items: Sequence[JetExpr], ctx: JetContext) -> list[str]:
    return [render(e, ctx) for e in items]


def _residual(items: Sequence[JetExpr], ctx: JetContext) -> ResidualReport:
    return ResidualReport(residual=_rendered(items, ctx), zero=all(e.is_zero for e in items))


def render_not_exact(exc: NotExactError, ctx: JetContext) -> str:
    """Message for a NotExactError with the caller's variable names."""
    text = f"{render(exc.integrand, ctx)} is not a total derivative"
    if exc.remainder is not None and exc.remainder != exc.integrand:
        text += f"; descent stalled at {render(exc.remainder, ctx)}"
    return text


# ── Calculus ──────────────────────────────────────────────────────────────────


def reduce_report(system: PdeSystem, text: str) -> ExpressionReport:
    return ExpressionReport(expression=render(system.reduce(parse(text, system.ctx)), system.ctx))


def format_operator(op: CDiffOp) -> OperatorReport:
    """Text rows ``[s,j] Σ coeff * D[σ]`` plus explicit σ vectors."""
    data = op.to_json()
    return OperatorReport(
        shape=data["shape"],
        restricted=data["restricted"],
        text=op.render_text(),
        entries=[
            OperatorEntry(row=e["row"], col=e["col"], terms=[OperatorTerm(**t) for t in e["terms"]])
            for e in data["entries"]
        ],
    )


def linearize_report(system: PdeSystem, *, restricted: bool = False, adjoint: bool = False) -> OperatorReport:
    op = linearize(system.equation_exprs(), system.ctx)
    if adjoint:
        op = op.adjoint()
    if restricted:
        op = op.restrict(system)
    return format_operator(op)


# ── Symmetries ────────────────────────────────────────────────────────────────


def _basis(basis: list[GeneratingFunction], spec: AnsatzSpec, ctx: JetContext) -> BasisReport:
    return BasisReport(
        order=spec.order,
        degree=spec.degree,
        xt_degree=spec.xt_degree,
        dimension=len(basis),
        basis=[gf.render(ctx) for gf in basis],
    )


def symmetries_report(system: PdeSystem, spec: AnsatzSpec, limit: int | None = None) -> BasisReport:
    return _basis(solve_determining(system, spec, limit=limit), spec, system.ctx)


def check_symmetry_report(system: PdeSystem, phi: str | Sequence[str]) -> ResidualReport:
    return _residual(symmetry_residual(system, GeneratingFunction.parse(phi, system.ctx)), system.ctx)


def bracket_report(ctx: JetContext, phi: str | Sequence[str], psi: str | Sequence[str],
                   system: PdeSystem | None = None) -> ComponentsReport:
    result = jacobi_bracket(GeneratingFunction.parse(phi, ctx), GeneratingFunction.parse(psi, ctx), system)
    return ComponentsReport(components=result.render(ctx))


def classify_report(ctx: JetContext, phi: str | Sequence[str]) -> ClassificationReport:
    result = classify(GeneratingFunction.parse(phi, ctx), ctx)
    if result.kind is not SymmetryKind.POINT:
        return ClassificationReport(kind=result.kind.value)
    return ClassificationReport(
        kind=result.kind.value,
        a=_rendered(result.generator.a, ctx),
        b=_rendered(result.generator.b, ctx),
        field=result.generator.render(ctx),
    )


def recursion_report(system: PdeSystem, operator: RecursionOperator, seed: str, steps: int) -> RecursionReport:
    ctx = system.ctx
    current = GeneratingFunction.parse(seed, ctx)
    produced, residuals = [], []
    for _ in range(steps):
        current = apply_recursion(operator, current, system)
        produced.append(current.render(ctx))
        residuals.append(_rendered(symmetry_residual(system, current), ctx))
    return RecursionReport(
        operator=operator.render(ctx),
        seed=GeneratingFunction.parse(seed, ctx).render(ctx),
        steps=produced,
        residuals=residuals,
    )


def integrate_report(ctx: JetContext, text: str, variable: str) -> ExpressionReport:
    i = ctx.variable_index(variable)
    return ExpressionReport(expression=render(formal_integrate(parse(text, ctx), i), ctx))


# ── Conservation laws ─────────────────────────────────────────────────────────


def conservation_report(system: PdeSystem, spec: AnsatzSpec, limit: int | None = None) -> BasisReport:
    return _basis(solve_adjoint_determining(system, spec, limit=limit), spec, system.ctx)


def check_conservation_report(system: PdeSystem, upsilon: str | Sequence[str]) -> ResidualReport:
    return _residual(adjoint_residual(system, GeneratingFunction.parse(upsilon, system.ctx)), system.ctx)


def euler_report(ctx: JetContext, lagrangian: str) -> ComponentsReport:
    return ComponentsReport(components=euler_operator(parse(lagrangian, ctx), ctx).render(ctx))


def check_current_report(system: PdeSystem, components: str | Sequence[str]) -> CurrentReport:
    divergence = verify_conserved_current(system, ConservedCurrent.parse(components, system.ctx))
    return CurrentReport(divergence=render(divergence, system.ctx), conserved=divergence.is_zero)


# ── Coverings ─────────────────────────────────────────────────────────────────


def nonlocal_report(covering: Covering, phi: str | Sequence[str], psi: str | Sequence[str]) -> NonlocalReport:
    ctx = covering.ctx
    phi_gf = GeneratingFunction.parse(phi, ctx)
    texts = psi.split(";") if isinstance(psi, str) else list(psi)
    return nonlocal_symmetry_residual(covering, phi_gf, [parse(t, ctx) for t in texts]).report(ctx)
