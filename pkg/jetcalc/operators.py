"""
C-differential operators: matrices whose entries are Σ_σ a_σ D_σ.

An operator is either free-jet (D_σ are the total derivatives) or restricted
to a system (D_σ means D̄_σ and coefficients are in internal coordinates).
Composition and adjoints are expanded eagerly into the canonical Σ b_τ D_τ
form.
"""

from __future__ import annotations

import json
import logging
from fractions import Fraction
from typing import Iterable, Mapping, Sequence

from jetcalc.calculus import DerivativeTable, GeneratingFunction, horizontal_derivative
from jetcalc.context import JetContext
from jetcalc.equation import PdeSystem
from jetcalc.errors import NonlocalCoordinateError, ShapeMismatchError
from jetcalc.expr import JetExpr, MultiIndex, partial, sum_exprs
from jetcalc.parser import render

logger = logging.getLogger(__name__)

Entry = Mapping[MultiIndex, JetExpr]


class CDiffOp:
    """Immutable l×m matrix of total-derivative operators."""

    __slots__ = ("ctx", "rows", "cols", "system", "_entries")

    def __init__(
        self,
        ctx: JetContext,
        rows: int,
        cols: int,
        entries: Mapping[tuple[int, int], Entry],
        system: PdeSystem | None = None,
    ):
        self.ctx = ctx
        self.rows = rows
        self.cols = cols
        self.system = system
        cleaned: dict[tuple[int, int], dict[MultiIndex, JetExpr]] = {}
        for (s, j), entry in entries.items():
            if not (0 <= s < rows and 0 <= j < cols):
                raise ShapeMismatchError(f"entry ({s}, {j}) outside a {rows}x{cols} operator")
            kept = {sigma: a for sigma, a in entry.items() if not a.is_zero}
            if kept:
                cleaned[(s, j)] = kept
        self._entries = cleaned

    # ── constructors ─────────────────────────────────────────────────────────

    @classmethod
    def identity(cls, ctx: JetContext, m: int | None = None) -> CDiffOp:
        m = ctx.m if m is None else m
        zero = MultiIndex.zero(ctx.n)
        return cls(ctx, m, m, {(j, j): {zero: JetExpr.one()} for j in range(m)})

    @classmethod
    def scalar(cls, ctx: JetContext, terms: Mapping[MultiIndex, JetExpr]) -> CDiffOp:
        return cls(ctx, 1, 1, {(0, 0): dict(terms)})

    # ── inspection ───────────────────────────────────────────────────────────

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def is_restricted(self) -> bool:
        return self.system is not None

    def entry(self, s: int, j: int) -> dict[MultiIndex, JetExpr]:
        return dict(self._entries.get((s, j), {}))

    def entries(self) -> dict[tuple[int, int], dict[MultiIndex, JetExpr]]:
        return {k: dict(v) for k, v in self._entries.items()}

    @property
    def is_zero(self) -> bool:
        return not self._entries

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CDiffOp):
            return NotImplemented
        return (
            self.shape == other.shape
            and self.system is other.system
            and self._entries == other._entries
        )

    __hash__ = None  # type: ignore[assignment]

    # ── derivatives used by this operator ────────────────────────────────────

    def _derivative(self, e: JetExpr, i: int) -> JetExpr:
        if self.system is not None:
            return self.system.restricted_total_derivative(e, i)
        return horizontal_derivative(e, i)

    def _d_sigma(self, e: JetExpr, sigma: MultiIndex) -> JetExpr:
        for i in sigma.steps():
            e = self._derivative(e, i)
        return e

    def _finish(self, e: JetExpr) -> JetExpr:
        return self.system.reduce(e) if self.system is not None else e

    # ── operations ───────────────────────────────────────────────────────────

    def apply(self, phi: GeneratingFunction | Sequence[JetExpr], derivative=None) -> list[JetExpr]:
        """Component s = Σ_{j,σ} a^{sj}_σ · D_σ(φ^j).

        ``derivative`` overrides D_i (the covering passes D̂_i).
        """
        phi = phi if isinstance(phi, GeneratingFunction) else GeneratingFunction(tuple(phi))
        if len(phi) != self.cols:
            raise ShapeMismatchError(f"operator has {self.cols} columns, argument has {len(phi)} components")
        if derivative is None:
            if self.system is None and any(p.has_nonlocal() for p in phi):
                raise NonlocalCoordinateError("free-jet operators cannot act on fiber coordinates")
            derivative = self._derivative
            start = phi.map(self._finish)
        else:
            start = phi
        table = DerivativeTable(start, derivative, self.ctx.n)
        out = []
        for s in range(self.rows):
            parts = [
                a * table.get(j, sigma)
                for (row, j), entry in self._entries.items()
                if row == s
                for sigma, a in entry.items()
            ]
            out.append(self._finish(sum_exprs(parts)))
        return out

    def adjoint(self) -> CDiffOp:
        """Transpose with (a·D_σ)* = (−1)^{|σ|} D_σ ∘ a expanded by Leibniz."""
        result: dict[tuple[int, int], dict[MultiIndex, JetExpr]] = {}
        for (s, j), entry in self._entries.items():
            target = result.setdefault((j, s), {})
            for sigma, a in entry.items():
                sign = -1 if sigma.order % 2 else 1
                for tau in sigma.sub_indices():
                    coefficient = self._finish(self._d_sigma(a, sigma - tau)) * (sign * sigma.binomial(tau))
                    target[tau] = target.get(tau, JetExpr.zero()) + coefficient
        return CDiffOp(self.ctx, self.cols, self.rows, result, self.system)

    def compose(self, other: CDiffOp) -> CDiffOp:
        """(self ∘ other), using (a D_σ)∘(b D_τ) = a Σ_ρ C(σ,ρ) D_{σ−ρ}(b) D_{ρ+τ}."""
        if self.cols != other.rows:
            raise ShapeMismatchError(f"cannot compose {self.shape} with {other.shape}")
        result: dict[tuple[int, int], dict[MultiIndex, JetExpr]] = {}
        for (s, j), left in self._entries.items():
            for (j2, k), right in other._entries.items():
                if j2 != j:
                    continue
                target = result.setdefault((s, k), {})
                for sigma, a in left.items():
                    for tau, b in right.items():
                        for rho in sigma.sub_indices():
                            term = a * self._finish(self._d_sigma(b, sigma - rho)) * sigma.binomial(rho)
                            key = rho + tau
                            target[key] = target.get(key, JetExpr.zero()) + term
        return CDiffOp(self.ctx, self.rows, other.cols, result, self.system)

    def restrict(self, system: PdeSystem) -> CDiffOp:
        """ℓ ↦ ℓ̄: coefficients reduced, D_σ reinterpreted as D̄_σ."""
        entries = {
            key: {sigma: system.reduce(a) for sigma, a in entry.items()}
            for key, entry in self._entries.items()
        }
        return CDiffOp(self.ctx, self.rows, self.cols, entries, system)

    def _combine(self, other: CDiffOp, sign: int) -> CDiffOp:
        if self.shape != other.shape:
            raise ShapeMismatchError(f"shapes differ: {self.shape} vs {other.shape}")
        result = self.entries()
        for key, entry in other._entries.items():
            target = result.setdefault(key, {})
            for sigma, a in entry.items():
                target[sigma] = target.get(sigma, JetExpr.zero()) + a * sign
        return CDiffOp(self.ctx, self.rows, self.cols, result, self.system or other.system)

    def __add__(self, other: CDiffOp) -> CDiffOp:
        return self._combine(other, 1)

    def __sub__(self, other: CDiffOp) -> CDiffOp:
        return self._combine(other, -1)

    def scale(self, lam: JetExpr | int | Fraction) -> CDiffOp:
        """λ·op (left multiplication of every coefficient)."""
        entries = {
            key: {sigma: self._finish(a * lam) for sigma, a in entry.items()}
            for key, entry in self._entries.items()
        }
        return CDiffOp(self.ctx, self.rows, self.cols, entries, self.system)

    # ── rendering ────────────────────────────────────────────────────────────

    def render_entry(self, s: int, j: int) -> str:
        entry = self._entries.get((s, j))
        if not entry:
            return "0"
        parts = []
        for sigma in sorted(entry, key=MultiIndex.graded_key, reverse=True):
            coefficient = render(entry[sigma], self.ctx)
            if not entry[sigma].is_polynomial or len(entry[sigma].num_terms) > 1:
                coefficient = f"({coefficient})"
            parts.append(f"{coefficient} * D[{','.join(map(str, sigma.exponents))}]")
        return " + ".join(parts)

    def render_text(self) -> list[str]:
        return [
            f"[{s},{j}] {self.render_entry(s, j)}"
            for s in range(self.rows)
            for j in range(self.cols)
        ]

    def to_json(self) -> dict:
        return {
            "shape": [self.rows, self.cols],
            "restricted": self.is_restricted,
            "entries": [
                {
                    "row": s,
                    "col": j,
                    "terms": [
                        {"sigma": list(sigma.exponents), "coefficient": render(entry[sigma], self.ctx)}
                        for sigma in sorted(entry, key=MultiIndex.graded_key, reverse=True)
                    ],
                }
                for (s, j), entry in sorted(self._entries.items())
            ],
        }

    def __repr__(self) -> str:
        return f"CDiffOp({json.dumps(self.to_json(), sort_keys=True)})"


def linearize(F: Iterable[JetExpr], ctx: JetContext) -> CDiffOp:
    """Universal linearization ℓ_F: entry (s, j, σ) = ∂F_s/∂u^j_σ."""
    F = list(F)
    entries: dict[tuple[int, int], dict[MultiIndex, JetExpr]] = {}
    for s, f in enumerate(F):
        if f.has_nonlocal():
            raise NonlocalCoordinateError("linearize() is defined on free jets")
        for c in f.coordinates():
            if c.is_jet:
                entries.setdefault((s, c.index), {})[c.sigma] = partial(f, c)
    return CDiffOp(ctx, len(F), ctx.m, entries)


def restrict_op(op: CDiffOp, system: PdeSystem) -> CDiffOp:
    return op.restrict(system)


def system_linearization(system: PdeSystem) -> CDiffOp:
    """ℓ̄_F of the system's own equations F_s = leader − rhs."""
    return linearize(system.equation_exprs(), system.ctx).restrict(system)
