"""
Symmetry routes — determining-equation solver, residual checks, Jacobi
brackets, classification, recursion and invariant systems.
"""

import logging

from fastapi import APIRouter
from pydantic import Field

from app.systems import ContextRequest, SystemRequest
from config.settings import get_settings
from jetcalc import reports
from jetcalc.ansatz import AnsatzSpec
from jetcalc.calculus import GeneratingFunction
from jetcalc.errors import NotExactError
from jetcalc.models import (
    BasisReport,
    ClassificationReport,
    ComponentsReport,
    InvariantSystemReport,
    RecursionReport,
    ResidualReport,
)
from jetcalc.symmetry import RecursionOperator, invariant_system

logger = logging.getLogger(__name__)

router = APIRouter()


class AnsatzRequest(SystemRequest):
    order: int = Field(..., ge=0, le=8)
    degree: int = Field(..., ge=1, le=6)
    xt_degree: int = Field(0, ge=0, le=6)


class CheckRequest(SystemRequest):
    phi: list[str] = Field(..., min_length=1, description="One expression per dependent variable")


class BracketRequest(ContextRequest):
    phi: list[str] = Field(..., min_length=1)
    psi: list[str] = Field(..., min_length=1)
    on_solutions: bool = False


class ClassifyRequest(ContextRequest):
    phi: list[str] = Field(..., min_length=1)


class RecursionRequest(SystemRequest):
    seed: list[str] = Field(default_factory=lambda: ["u_x"])
    steps: int = Field(1, ge=1, le=4)
    operator: list[str] | None = Field(None, description="Operator terms; the KdV operator when omitted")


class InvariantRequest(SystemRequest):
    phis: list[list[str]] = Field(..., min_length=1)


@router.post("/solve", response_model=BasisReport)
def solve(req: AnsatzRequest):
    """Basis of symmetries in the bounded polynomial ansatz."""
    spec = AnsatzSpec(order=req.order, degree=req.degree, xt_degree=req.xt_degree)
    return reports.symmetries_report(req.resolve(), spec, limit=get_settings().ansatz_limit)


@router.post("/check", response_model=ResidualReport)
def check(req: CheckRequest):
    return reports.check_symmetry_report(req.resolve(), req.phi)


@router.post("/bracket", response_model=ComponentsReport)
def bracket(req: BracketRequest):
    ctx, system = req.resolve()
    return reports.bracket_report(ctx, req.phi, req.psi, system if req.on_solutions else None)


@router.post("/classify", response_model=ClassificationReport)
def classify(req: ClassifyRequest):
    ctx, _ = req.resolve()
    return reports.classify_report(ctx, req.phi)


@router.post("/recursion", response_model=RecursionReport)
def recursion(req: RecursionRequest):
    system = req.resolve()
    operator = RecursionOperator.parse(req.operator, system.ctx) if req.operator else RecursionOperator.kdv()
    try:
        return reports.recursion_report(system, operator, req.seed, req.steps)
    except NotExactError as exc:
        exc.args = (reports.render_not_exact(exc, system.ctx),)
        raise


@router.post("/invariant-system", response_model=InvariantSystemReport)
def invariant(req: InvariantRequest):
    system = req.resolve()
    logger.info("Invariant system for %d generating function(s)", len(req.phis))
    return invariant_system(system, [GeneratingFunction.parse(phi, system.ctx) for phi in req.phis])
