"""
Boundary models — file payloads, run configuration and result reports.

Every expression crossing a boundary is a canonical string that parses back
to the same expression under the declared variables. Reports are what the
CLI prints (text or ``model_dump_json``) and what the service returns.
"""

from __future__ import annotations

import re
from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")


def _names(values: list[str], what: str) -> list[str]:
    cleaned = [v.strip() for v in values if v.strip()]
    for name in cleaned:
        if not _NAME.match(name):
            raise ValueError(f"invalid {what} name {name!r}")
    return cleaned


# ── File payloads ─────────────────────────────────────────────────────────────


class SystemFile(BaseModel):
    """A solved-form system: ``independent``, ``dependent`` and ``equation`` lines."""

    model_config = ConfigDict(frozen=True)

    independent: list[str] = Field(..., min_length=1)
    dependent: list[str] = Field(..., min_length=1)
    equations: list[str] = Field(..., min_length=1)

    @field_validator("independent", "dependent")
    @classmethod
    def validate_names(cls, v: list[str]) -> list[str]:
        cleaned = _names(v, "variable")
        if not cleaned:
            raise ValueError("at least one variable name is required")
        return cleaned

    @field_validator("equations")
    @classmethod
    def validate_equations(cls, v: list[str]) -> list[str]:
        for text in v:
            if "=" not in text:
                raise ValueError(f"equation {text!r} has no '='")
        return [text.strip() for text in v]


class CoveringFile(SystemFile):
    """A system plus ``fiber`` names and ``V_<x>[<w>] = expr`` coefficients."""

    fiber: list[str] = Field(default_factory=list)
    # independent variable name -> fiber name -> coefficient text
    coefficients: dict[str, dict[str, str]] = Field(default_factory=dict)

    @field_validator("fiber")
    @classmethod
    def validate_fiber(cls, v: list[str]) -> list[str]:
        return _names(v, "fiber")

    @model_validator(mode="after")
    def validate_fields(self):
        for variable, table in self.coefficients.items():
            if variable not in self.independent:
                raise ValueError(f"V_{variable}: {variable!r} is not an independent variable")
            for w in table:
                if w not in self.fiber:
                    raise ValueError(f"V_{variable}[{w}]: {w!r} is not a declared fiber coordinate")
        return self


class RepresentationFile(BaseModel):
    """Four vertical fields A, B, C, D on a common fiber (``A[w] = expr`` lines)."""

    model_config = ConfigDict(frozen=True)

    fiber: list[str] = Field(..., min_length=1)
    coefficients: dict[Literal["A", "B", "C", "D"], dict[str, str]] = Field(default_factory=dict)

    @field_validator("fiber")
    @classmethod
    def validate_fiber(cls, v: list[str]) -> list[str]:
        return _names(v, "fiber")

    @model_validator(mode="after")
    def validate_fields(self):
        for name, table in self.coefficients.items():
            for w in table:
                if w not in self.fiber:
                    raise ValueError(f"{name}[{w}]: {w!r} is not a declared fiber coordinate")
        return self


# ── Run configuration ─────────────────────────────────────────────────────────


class RunConfig(BaseModel):
    """One CLI invocation after flag parsing."""

    command: str
    system: str | None = None
    order: int = Field(2, ge=0)
    degree: int = Field(2, ge=1)
    xt_degree: int = Field(0, ge=0)
    phi: list[str] = Field(default_factory=list)
    psi: list[str] = Field(default_factory=list)
    output_format: Literal["text", "json"] = "text"
    ansatz_limit: int = Field(20000, ge=1)


# ── Reports ───────────────────────────────────────────────────────────────────


class ExpressionReport(BaseModel):
    expression: str


class ResidualReport(BaseModel):
    residual: list[str]
    zero: bool


class OperatorTerm(BaseModel):
    sigma: list[int]
    coefficient: str


class OperatorEntry(BaseModel):
    row: int
    col: int
    terms: list[OperatorTerm]


class OperatorReport(BaseModel):
    shape: list[int]
    restricted: bool
    text: list[str]
    entries: list[OperatorEntry]


class BasisReport(BaseModel):
    order: int
    degree: int
    xt_degree: int
    dimension: int
    basis: list[list[str]]


class ComponentsReport(BaseModel):
    components: list[str]


class ClassificationReport(BaseModel):
    kind: Literal["Point", "Contact", "Higher"]
    a: list[str] | None = None
    b: list[str] | None = None
    field: str | None = None


class RecursionReport(BaseModel):
    operator: list[str]
    seed: list[str]
    steps: list[list[str]]
    residuals: list[list[str]] | None = None


class InvariantSystemReport(BaseModel):
    independent: list[str]
    dependent: list[str]
    equations: list[str]
    constraints: list[str]
    flow_parameter: str
    trajectories: list[str]
    residuals: list[list[str]]


class SelfAdjointReport(BaseModel):
    conformal_factor: str
    self_adjoint: bool
    self_adjoint_on_solutions: bool
    difference: list[str]


class CurrentReport(BaseModel):
    divergence: str
    conserved: bool


class FlatnessEntry(BaseModel):
    i: str
    j: str
    fiber: str
    residual: str


class FlatnessReport(BaseModel):
    flat: bool
    residuals: list[FlatnessEntry]


class RelationEntry(BaseModel):
    relation: str
    residual: list[str]
    holds: bool


class WeAssemblyReport(BaseModel):
    reading: Literal["literal", "corrected"]
    v_x: list[str]
    v_t: list[str]
    relations: list[RelationEntry]
    relations_hold: bool
    flatness: FlatnessReport


class FiberResidual(BaseModel):
    variable: str
    fiber: str
    residual: str


class NonlocalReport(BaseModel):
    determining: list[str]
    fiber: list[FiberResidual]
    symmetry: bool
