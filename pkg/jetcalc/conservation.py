"""
Conservation laws through the adjoint linearization.

Generating functions Υ of conservation laws solve ℓ̄*_F(Υ) = 0; the Euler
operator is ω ↦ ℓ*_ω(1); currents are checked directly through their total
divergence on E∞.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterator, Sequence

from jetcalc.ansatz import AnsatzSpec, solve_linear_ansatz
from jetcalc.calculus import GeneratingFunction
from jetcalc.context import JetContext
from jetcalc.equation import Equation, PdeSystem, ranking_key
from jetcalc.errors import InvalidSystemError, ShapeMismatchError
from jetcalc.expr import JetExpr
from jetcalc.models import SelfAdjointReport
from jetcalc.operators import CDiffOp, linearize
from jetcalc.parser import parse, render

logger = logging.getLogger(__name__)


@lru_cache(maxsize=32)
def _adjoint_linearization(system: PdeSystem) -> CDiffOp:
    return linearize(system.equation_exprs(), system.ctx).adjoint().restrict(system)


def adjoint_residual(system: PdeSystem, upsilon: GeneratingFunction) -> list[JetExpr]:
    """ℓ̄*_F(Υ); Υ generates a conservation law iff every component is zero."""
    upsilon.check_length(system.size)
    return _adjoint_linearization(system).apply(upsilon.map(system.reduce))


def solve_adjoint_determining(system: PdeSystem, spec: AnsatzSpec, *, limit: int | None = None) -> list[GeneratingFunction]:
    if system.size != system.ctx.m:
        raise ShapeMismatchError("the ansatz solver needs as many equations as dependent variables")
    return solve_linear_ansatz(system, spec, lambda u: adjoint_residual(system, u), limit=limit)


def euler_operator(omega: JetExpr, ctx: JetContext) -> GeneratingFunction:
    """Variational derivative E_j(ω) = Σ_σ (−1)^{|σ|} D_σ(∂ω/∂u^j_σ)."""
    adjoint = linearize([omega], ctx).adjoint()
    return GeneratingFunction(tuple(adjoint.apply(GeneratingFunction.of(1))))


def euler_lagrange_system(omega: JetExpr, ctx: JetContext) -> PdeSystem:
    """Solve E(ω) = 0 for the top-ranked coordinate of each component.

    Each component must be linear in its top coordinate with a constant
    coefficient, which holds for the usual kinetic-plus-potential densities.
    """
    equations = []
    for j, e in enumerate(euler_operator(omega, ctx)):
        jets = [c for c in e.coordinates() if c.is_jet]
        if e.is_zero or not jets or not e.is_polynomial:
            raise InvalidSystemError(f"Euler-Lagrange component {j} cannot be put in solved form")
        top = max(jets, key=ranking_key)
        parts = e.collect(top)
        coefficient = parts.get(1, JetExpr.zero()).constant_value
        if set(parts) - {0, 1} or not coefficient:
            raise InvalidSystemError(
                f"Euler-Lagrange component {j} is not linear in {ctx.name_of(top)} with a constant coefficient"
            )
        rest = parts.get(0, JetExpr.zero())
        equations.append(Equation(top, -rest / coefficient))
    return PdeSystem(ctx, equations)


def self_adjointness_check(system: PdeSystem, conformal_factor: JetExpr | None = None) -> SelfAdjointReport:
    """Compare ℓ*_F with λ·ℓ_F on free jets and after restriction to E∞."""
    if system.size != system.ctx.m:
        raise ShapeMismatchError("self-adjointness is defined for square systems")
    lam = JetExpr.one() if conformal_factor is None else conformal_factor
    ell = linearize(system.equation_exprs(), system.ctx)
    difference = ell.adjoint() - ell.scale(lam)
    restricted = difference.restrict(system)
    logger.info("self-adjointness: free %s, on solutions %s", difference.is_zero, restricted.is_zero)
    return SelfAdjointReport(
        conformal_factor=render(lam, system.ctx),
        self_adjoint=difference.is_zero,
        self_adjoint_on_solutions=restricted.is_zero,
        difference=difference.render_text(),
    )


@dataclass(frozen=True)
class ConservedCurrent:
    """(J¹, …, Jⁿ), one component per independent variable."""

    components: tuple[JetExpr, ...]

    @classmethod
    def parse(cls, texts: str | Sequence[str], ctx: JetContext) -> ConservedCurrent:
        if isinstance(texts, str):
            texts = texts.split(";")
        current = cls(tuple(parse(t, ctx) for t in texts))
        if len(current.components) != ctx.n:
            raise ShapeMismatchError(
                f"current has {len(current.components)} components, expected {ctx.n}"
            )
        return current

    @classmethod
    def of(cls, *components: JetExpr | int | Fraction) -> ConservedCurrent:
        return cls(tuple(c if isinstance(c, JetExpr) else JetExpr.constant(c) for c in components))

    def __iter__(self) -> Iterator[JetExpr]:
        return iter(self.components)


def verify_conserved_current(system: PdeSystem, current: ConservedCurrent) -> JetExpr:
    """Σ_i D̄_i(J^i); zero iff J is conserved on E∞."""
    if len(current.components) != system.ctx.n:
        raise ShapeMismatchError(
            f"current has {len(current.components)} components, expected {system.ctx.n}"
        )
    total = JetExpr.zero()
    for i, component in enumerate(current):
        total = total + system.restricted_total_derivative(component, i)
    return system.reduce(total)
