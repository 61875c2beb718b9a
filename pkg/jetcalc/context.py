"""
Variable declarations: independent variables, dependent variables and the
optional fiber coordinates of a covering.

Names are alphanumeric (no underscore, which separates a dependent variable
from its derivative suffix). No independent name may be a prefix of another,
so an unbraced suffix such as ``xxt`` splits uniquely.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from functools import cached_property

from jetcalc.errors import InvalidContextError
from jetcalc.expr import Coordinate, CoordinateKind, MultiIndex, multi_indices

_NAME = re.compile(r"^[A-Za-z][A-Za-z0-9]*$")
_RESERVED = {"D", "Dinv"}


@dataclass(frozen=True)
class JetContext:
    independent: tuple[str, ...]
    dependent: tuple[str, ...]
    fiber: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "independent", tuple(self.independent))
        object.__setattr__(self, "dependent", tuple(self.dependent))
        object.__setattr__(self, "fiber", tuple(self.fiber))
        if not self.independent:
            raise InvalidContextError("at least one independent variable is required")
        if not self.dependent:
            raise InvalidContextError("at least one dependent variable is required")
        names = self.independent + self.dependent + self.fiber
        for name in names:
            if not _NAME.match(name) or name in _RESERVED:
                raise InvalidContextError(f"invalid variable name {name!r}")
        duplicates = sorted({n for n in names if names.count(n) > 1})
        if duplicates:
            raise InvalidContextError(f"variable names must be distinct: {duplicates}")
        for a in self.independent:
            for b in self.independent:
                if a != b and b.startswith(a):
                    raise InvalidContextError(
                        f"independent name {a!r} is a prefix of {b!r}; derivative suffixes would be ambiguous"
                    )

    @classmethod
    def from_names(cls, independent: str, dependent: str, fiber: str = "") -> JetContext:
        """Build from comma-separated name lists, e.g. ``("x, t", "u")``."""
        split = lambda s: tuple(p.strip() for p in s.split(",") if p.strip())  # noqa: E731
        return cls(split(independent), split(dependent), split(fiber))

    @property
    def n(self) -> int:
        return len(self.independent)

    @property
    def m(self) -> int:
        return len(self.dependent)

    @property
    def r(self) -> int:
        return len(self.fiber)

    def with_fiber(self, fiber: tuple[str, ...]) -> JetContext:
        return JetContext(self.independent, self.dependent, tuple(fiber))

    # ── coordinates ──────────────────────────────────────────────────────────

    def x(self, i: int) -> Coordinate:
        return Coordinate.independent(i)

    def u(self, j: int = 0, sigma: tuple[int, ...] | MultiIndex | None = None) -> Coordinate:
        if sigma is None:
            sigma = MultiIndex.zero(self.n)
        elif not isinstance(sigma, MultiIndex):
            sigma = MultiIndex(tuple(sigma))
        return Coordinate.jet(j, sigma)

    def w(self, a: int) -> Coordinate:
        return Coordinate.fiber(a)

    def jet_coordinates(self, max_order: int) -> list[Coordinate]:
        """Every u^j_σ with |σ| ≤ max_order."""
        return [
            Coordinate.jet(j, sigma)
            for sigma in multi_indices(self.n, max_order)
            for j in range(self.m)
        ]

    def variable_index(self, name: str) -> int:
        try:
            return self.independent.index(name)
        except ValueError:
            raise InvalidContextError(f"{name!r} is not an independent variable") from None

    # ── naming ───────────────────────────────────────────────────────────────

    def name_of(self, c: Coordinate) -> str:
        if c.kind is CoordinateKind.INDEPENDENT:
            return self.independent[c.index]
        if c.kind is CoordinateKind.NONLOCAL:
            return self.fiber[c.index]
        base = self.dependent[c.index]
        if c.sigma.order == 0:
            return base
        suffix = "".join(self.independent[i] for i in c.sigma.steps())
        return f"{base}_{suffix}"

    @cached_property
    def _symbols(self) -> dict[str, Coordinate]:
        table = {name: Coordinate.independent(i) for i, name in enumerate(self.independent)}
        table.update({name: Coordinate.fiber(a) for a, name in enumerate(self.fiber)})
        table.update({name: self.u(j) for j, name in enumerate(self.dependent)})
        return table

    def lookup(self, name: str) -> Coordinate | None:
        """Resolve ``x``, ``u``, ``w``, ``u_xxt`` or ``u_{xxt}``; None when undeclared."""
        if name in self._symbols:
            return self._symbols[name]
        base, sep, suffix = name.partition("_")
        if not sep or base not in self.dependent:
            return None
        if suffix.startswith("{") and suffix.endswith("}"):
            suffix = suffix[1:-1]
        sigma = self._split_suffix(suffix)
        if sigma is None:
            return None
        return Coordinate.jet(self.dependent.index(base), sigma)

    def _split_suffix(self, suffix: str) -> MultiIndex | None:
        if not suffix:
            return None
        counts = [0] * self.n
        names = sorted(self.independent, key=len, reverse=True)
        pos = 0
        while pos < len(suffix):
            for name in names:
                if suffix.startswith(name, pos):
                    counts[self.independent.index(name)] += 1
                    pos += len(name)
                    break
            else:
                return None
        return MultiIndex(tuple(counts))
