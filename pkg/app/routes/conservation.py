"""
Conservation-law routes — adjoint determining equation, residual checks,
conserved currents and self-adjointness.
"""

from fastapi import APIRouter
from pydantic import Field

from app.routes.symmetry import AnsatzRequest
from app.systems import SystemRequest
from config.settings import get_settings
from jetcalc import reports
from jetcalc.ansatz import AnsatzSpec
from jetcalc.conservation import self_adjointness_check
from jetcalc.models import BasisReport, CurrentReport, ResidualReport, SelfAdjointReport
from jetcalc.parser import parse

router = APIRouter()


class CheckRequest(SystemRequest):
    upsilon: list[str] = Field(..., min_length=1)


class CurrentRequest(SystemRequest):
    components: list[str] = Field(..., min_length=1, description="J components in independent-variable order")


class SelfAdjointRequest(SystemRequest):
    conformal_factor: str | None = None


@router.post("/solve", response_model=BasisReport)
def solve(req: AnsatzRequest):
    """Basis of generating functions of conservation laws in the ansatz."""
    spec = AnsatzSpec(order=req.order, degree=req.degree, xt_degree=req.xt_degree)
    return reports.conservation_report(req.resolve(), spec, limit=get_settings().ansatz_limit)


@router.post("/check", response_model=ResidualReport)
def check(req: CheckRequest):
    return reports.check_conservation_report(req.resolve(), req.upsilon)


@router.post("/current", response_model=CurrentReport)
def current(req: CurrentRequest):
    return reports.check_current_report(req.resolve(), req.components)


@router.post("/self-adjoint", response_model=SelfAdjointReport)
def self_adjoint(req: SelfAdjointRequest):
    system = req.resolve()
    lam = parse(req.conformal_factor, system.ctx) if req.conformal_factor else None
    return self_adjointness_check(system, lam)
