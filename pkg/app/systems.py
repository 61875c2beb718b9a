"""
Request-side system resolution shared by the route modules.

A request names a built-in (``"system": "kdv"``) or carries the system
inline. File paths are never accepted over HTTP.
"""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator

from jetcalc import builtins
from jetcalc.context import JetContext
from jetcalc.covering import Covering, Representation
from jetcalc.equation import PdeSystem
from jetcalc.errors import CoveringError, InvalidContextError, InvalidSystemError
from jetcalc.loader import (
    build_covering,
    build_representation,
    build_system,
    parse_covering_text,
    parse_representation_text,
    parse_system_text,
)
from jetcalc.models import CoveringFile, RepresentationFile, SystemFile


class SystemRequest(BaseModel):
    system: str | None = Field(None, description="Built-in system name (burgers, kdv, heat)")
    inline: SystemFile | None = Field(None, description="Inline system instead of a built-in")

    @model_validator(mode="after")
    def validate_source(self):
        if (self.system is None) == (self.inline is None):
            raise ValueError("give exactly one of 'system' or 'inline'")
        return self

    def resolve(self) -> PdeSystem:
        if self.inline is not None:
            return build_system(self.inline)
        if self.system not in builtins.SYSTEMS:
            raise InvalidSystemError(f"unknown built-in system {self.system!r} ({', '.join(sorted(builtins.SYSTEMS))})")
        return build_system(parse_system_text(builtins.SYSTEMS[self.system]))


class ContextRequest(BaseModel):
    """Bare variable declarations, or a system whose variables are borrowed."""

    independent: list[str] | None = None
    dependent: list[str] | None = None
    system: str | None = None
    inline: SystemFile | None = None

    @model_validator(mode="after")
    def validate_source(self):
        declared = bool(self.independent or self.dependent)
        borrowed = (self.system is not None) + (self.inline is not None)
        if declared == bool(borrowed) or borrowed > 1:
            raise ValueError("give variables, or exactly one of 'system' or 'inline'")
        return self

    def resolve(self) -> tuple[JetContext, PdeSystem | None]:
        if self.independent or self.dependent:
            if not (self.independent and self.dependent):
                raise InvalidContextError("'independent' and 'dependent' go together")
            return JetContext(tuple(self.independent), tuple(self.dependent)), None
        system = SystemRequest(system=self.system, inline=self.inline).resolve()
        return system.ctx, system


class CoveringRequest(BaseModel):
    covering: str | None = Field(None, description="Built-in covering name (kdv-potential, cole-hopf)")
    inline: CoveringFile | None = None

    @model_validator(mode="after")
    def validate_source(self):
        if (self.covering is None) == (self.inline is None):
            raise ValueError("give exactly one of 'covering' or 'inline'")
        return self

    def resolve(self) -> Covering:
        if self.inline is not None:
            return build_covering(self.inline)
        if self.covering not in builtins.COVERINGS:
            raise CoveringError(f"unknown built-in covering {self.covering!r}")
        return build_covering(parse_covering_text(builtins.COVERINGS[self.covering]))


class RepresentationRequest(BaseModel):
    representation: str | None = Field(None, description="Built-in representation name (we-abelian)")
    inline: RepresentationFile | None = None

    @model_validator(mode="after")
    def validate_source(self):
        if (self.representation is None) == (self.inline is None):
            raise ValueError("give exactly one of 'representation' or 'inline'")
        return self

    def resolve(self) -> Representation:
        if self.inline is not None:
            return build_representation(self.inline)
        if self.representation not in builtins.REPRESENTATIONS:
            raise CoveringError(f"unknown built-in representation {self.representation!r}")
        return build_representation(parse_representation_text(builtins.REPRESENTATIONS[self.representation]))
