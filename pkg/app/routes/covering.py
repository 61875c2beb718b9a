"""
Covering routes — flatness, nonlocal symmetries and the WE assembly for KdV.
"""

from fastapi import APIRouter
from pydantic import Field

from app.systems import CoveringRequest, RepresentationRequest
from jetcalc import reports
from jetcalc.covering import flatness_report, we_report
from jetcalc.models import FlatnessReport, NonlocalReport, WeAssemblyReport

router = APIRouter()


class NonlocalRequest(CoveringRequest):
    phi: list[str] = Field(..., min_length=1)
    psi: list[str] = Field(..., min_length=1, description="One component per fiber coordinate")


class WeRequest(RepresentationRequest):
    literal: bool = False


@router.post("/check", response_model=FlatnessReport)
def check(req: CoveringRequest):
    return flatness_report(req.resolve())


@router.post("/nonlocal", response_model=NonlocalReport)
def nonlocal_symmetry(req: NonlocalRequest):
    return reports.nonlocal_report(req.resolve(), req.phi, req.psi)


@router.post("/we", response_model=WeAssemblyReport)
def we(req: WeRequest):
    """Assemble the WE covering of KdV and judge its relations and flatness."""
    return we_report(req.resolve(), literal=req.literal)
