"""
Solved-form PDE systems and their infinite prolongation E∞.

A system is a list of equations ``leader = rhs`` with

  * leaders that are jet coordinates, none a derivative of another;
  * right-hand sides in internal coordinates only (no leader consequence);
  * right-hand sides ranking-lower than their leader.

Ranking: lexicographic on derivative orders with the last-declared
independent variable most significant (``t`` in ``x, t``), dependent index
breaking ties. It is compatible with differentiation, so replacing a leader
consequence u^j_{τ+ρ} by D_ρ(rhs) strictly lowers rank and reduction
terminates; non-overlapping leaders make the normal form unique.
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass
from typing import Iterable, Sequence

from config.settings import get_settings
from jetcalc.calculus import horizontal_derivative
from jetcalc.context import JetContext
from jetcalc.errors import InvalidSystemError, JetCalcError
from jetcalc.expr import Coordinate, JetExpr, MultiIndex, substitute
from jetcalc.parser import parse, render

logger = logging.getLogger(__name__)


def ranking_key(c: Coordinate) -> tuple:
    """Admissible ranking of jet coordinates (see module docstring)."""
    return (tuple(reversed(c.sigma.exponents)), c.index)


@dataclass(frozen=True)
class Equation:
    leader: Coordinate
    rhs: JetExpr


@dataclass(frozen=True)
class InternalCoordinateSet:
    """Decides whether a jet coordinate is internal (parametric) on E∞."""

    leaders: tuple[Coordinate, ...]

    def __contains__(self, c: Coordinate) -> bool:
        if not c.is_jet:
            return True
        return self.leader_for(c) is None

    def leader_for(self, c: Coordinate) -> int | None:
        for s, leader in enumerate(self.leaders):
            if leader.index == c.index and c.sigma.dominates(leader.sigma):
                return s
        return None


class PdeSystem:
    """Orthonomic PDE system; immutable apart from its reduction memo."""

    def __init__(self, ctx: JetContext, equations: Sequence[Equation], *, memo: bool | None = None):
        self.ctx = ctx
        self.equations: tuple[Equation, ...] = tuple(equations)
        self.internal = InternalCoordinateSet(tuple(eq.leader for eq in self.equations))
        self._memo_enabled = get_settings().reduction_memo if memo is None else memo
        self._memo: dict[Coordinate, JetExpr] = {}
        self._lock = threading.Lock()
        self._validate()
        logger.info("PDE system ready: %s", "; ".join(self.render()))

    @classmethod
    def from_strings(cls, ctx: JetContext, equations: Iterable[str], **kwargs) -> PdeSystem:
        """Parse ``"lhs = rhs"`` lines; each lhs must be a single jet coordinate."""
        parsed = []
        for text in equations:
            lhs_text, sep, rhs_text = text.partition("=")
            if not sep:
                raise InvalidSystemError(f"equation {text!r} has no '='")
            lhs = parse(lhs_text, ctx)
            leader = _single_coordinate(lhs)
            if leader is None or not leader.is_jet:
                raise InvalidSystemError(
                    f"left-hand side {lhs_text.strip()!r} must be a single derivative coordinate"
                )
            parsed.append(Equation(leader, parse(rhs_text, ctx)))
        return cls(ctx, parsed, **kwargs)

    # ── validation ───────────────────────────────────────────────────────────

    def _validate(self) -> None:
        if not self.equations:
            raise InvalidSystemError("a system needs at least one equation")
        name = lambda c: self.ctx.name_of(c)  # noqa: E731
        leaders = self.internal.leaders
        for a, la in enumerate(leaders):
            if la.index >= self.ctx.m or len(la.sigma) != self.ctx.n:
                raise InvalidSystemError(f"leader {la} does not fit the declared variables")
            for b, lb in enumerate(leaders):
                if a != b and la.index == lb.index and la.sigma.dominates(lb.sigma):
                    raise InvalidSystemError(
                        f"leader {name(la)} is a derivative of leader {name(lb)}"
                    )
        for eq in self.equations:
            for c in eq.rhs.coordinates():
                if c.is_nonlocal:
                    raise InvalidSystemError("right-hand sides cannot mention fiber coordinates")
                if not c.is_jet:
                    continue
                if c not in self.internal:
                    raise InvalidSystemError(
                        f"right-hand side of {name(eq.leader)} mentions {name(c)}, "
                        "a consequence of a leader"
                    )
                if ranking_key(c) >= ranking_key(eq.leader):
                    raise InvalidSystemError(
                        f"right-hand side of {name(eq.leader)} mentions {name(c)}, "
                        "which does not rank below the leader"
                    )

    # ── E∞ ───────────────────────────────────────────────────────────────────

    @property
    def size(self) -> int:
        return len(self.equations)

    def equation_expr(self, s: int) -> JetExpr:
        """F_s = leader − rhs."""
        eq = self.equations[s]
        return JetExpr.coordinate(eq.leader) - eq.rhs

    def equation_exprs(self) -> list[JetExpr]:
        return [self.equation_expr(s) for s in range(self.size)]

    def prolong_equation(self, s: int, sigma: MultiIndex) -> JetExpr:
        """D_σ(F_s) on free jets, unreduced."""
        e = self.equation_expr(s)
        for i in sigma.steps():
            e = horizontal_derivative(e, i)
        return e

    def is_internal(self, c: Coordinate) -> bool:
        return c in self.internal

    def internal_coordinates(self, max_order: int) -> list[Coordinate]:
        return [c for c in self.ctx.jet_coordinates(max_order) if c in self.internal]

    def reduce(self, e: JetExpr) -> JetExpr:
        """Normal form of e modulo all D_σ F_s = 0 (fiber coordinates pass through)."""
        pending = [c for c in e.coordinates() if c.is_jet and c not in self.internal]
        if not pending:
            return e
        return substitute(e, {c: self._reduced_coordinate(c) for c in pending})

    def restricted_total_derivative(self, e: JetExpr, i: int) -> JetExpr:
        """D̄_i(e) = reduce(D_i(e))."""
        return self.reduce(horizontal_derivative(self.reduce(e), i))

    def _reduced_coordinate(self, c: Coordinate) -> JetExpr:
        if self._memo_enabled:
            hit = self._memo.get(c)
            if hit is not None:
                return hit
        s = self.internal.leader_for(c)
        leader = self.equations[s].leader
        rho = c.sigma - leader.sigma
        if rho.order == 0:
            value = self.equations[s].rhs
        else:
            i = next(k for k, e in enumerate(rho.exponents) if e > 0)
            lower = Coordinate.jet(c.index, c.sigma.bump(i, -1))
            try:
                value = self.reduce(horizontal_derivative(self._reduced_coordinate(lower), i))
            except JetCalcError:
                logger.error("reduction of %s failed", self.ctx.name_of(c))
                raise
        if self._memo_enabled:
            with self._lock:
                value = self._memo.setdefault(c, value)
            logger.debug("reduction memo: %s (%d entries)", self.ctx.name_of(c), len(self._memo))
        return value

    # ── rendering ────────────────────────────────────────────────────────────

    def render(self) -> list[str]:
        return [
            f"{self.ctx.name_of(eq.leader)} = {render(eq.rhs, self.ctx)}" for eq in self.equations
        ]

    def __repr__(self) -> str:
        return f"PdeSystem({'; '.join(self.render())})"


def _single_coordinate(e: JetExpr) -> Coordinate | None:
    if not e.is_polynomial or len(e.num_terms) != 1:
        return None
    ((m, q),) = e.num_terms.items()
    if q != 1 or len(m) != 1 or m[0][1] != 1:
        return None
    return m[0][0]


def new_system(ctx: JetContext, equations: Iterable[str]) -> PdeSystem:
    """Validated system from ``"lhs = rhs"`` strings."""
    return PdeSystem.from_strings(ctx, equations)
