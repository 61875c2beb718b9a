"""
Calculus routes — normal forms, linearizations, formal integration and the
Euler operator.
"""

from fastapi import APIRouter
from pydantic import Field

from app.systems import ContextRequest, SystemRequest
from jetcalc import reports
from jetcalc.errors import NotExactError
from jetcalc.models import ComponentsReport, ExpressionReport, OperatorReport

router = APIRouter()


class ReduceRequest(SystemRequest):
    expression: str = Field(..., min_length=1, max_length=10_000)


class LinearizeRequest(SystemRequest):
    restricted: bool = False
    adjoint: bool = False


class IntegrateRequest(ContextRequest):
    expression: str = Field(..., min_length=1, max_length=10_000)
    variable: str | None = None


class EulerRequest(ContextRequest):
    lagrangian: str = Field(..., min_length=1, max_length=10_000)


@router.post("/reduce", response_model=ExpressionReport)
def reduce_expression(req: ReduceRequest):
    """Normal form of ``expression`` on the infinite prolongation."""
    return reports.reduce_report(req.resolve(), req.expression)


@router.post("/linearize", response_model=OperatorReport)
def linearize(req: LinearizeRequest):
    """ℓ_F, or its formal adjoint with ``adjoint``; restricted to E∞ with ``restricted``."""
    return reports.linearize_report(req.resolve(), restricted=req.restricted, adjoint=req.adjoint)


@router.post("/integrate", response_model=ExpressionReport)
def integrate(req: IntegrateRequest):
    ctx, _ = req.resolve()
    try:
        return reports.integrate_report(ctx, req.expression, req.variable or ctx.independent[0])
    except NotExactError as exc:
        exc.args = (reports.render_not_exact(exc, ctx),)
        raise


@router.post("/euler", response_model=ComponentsReport)
def euler(req: EulerRequest):
    ctx, _ = req.resolve()
    return reports.euler_report(ctx, req.lagrangian)


