"""
Exact expression kernel: multi-indices, jet coordinates and canonical
differential-polynomial / rational expressions over ℚ.

A ``JetExpr`` is a numerator/denominator pair of sparse polynomials. Every
constructor returns the canonical representative:

  * no zero coefficients, monomials duplicate-free;
  * polynomials carry the denominator ``1``;
  * genuine fractions are gcd-reduced (sympy's sparse ``PolyElement.cancel``)
    and the denominator is made monic with respect to the monomial order.

Coordinates are ranked by (kind, dependent index, |σ|, σ); monomials are
compared lexicographically on their coordinates listed from highest to
lowest, so ``u_xxx`` outranks ``u*u_x`` and ``t*u_x`` outranks ``u_x``.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Callable, Iterable, Iterator, Mapping

from sympy import QQ
from sympy.polys.rings import ring

from jetcalc.errors import ZeroDenominatorError

# ── Multi-indices ─────────────────────────────────────────────────────────────


@dataclass(frozen=True, slots=True)
class MultiIndex:
    """Exponent vector σ over the independent variables."""

    exponents: tuple[int, ...]

    def __post_init__(self) -> None:
        if any(e < 0 for e in self.exponents):
            raise ValueError(f"multi-index entries must be >= 0, got {self.exponents}")

    @classmethod
    def zero(cls, n: int) -> MultiIndex:
        return cls((0,) * n)

    @classmethod
    def unit(cls, n: int, i: int) -> MultiIndex:
        return cls.zero(n).bump(i)

    @property
    def order(self) -> int:
        return sum(self.exponents)

    def __len__(self) -> int:
        return len(self.exponents)

    def __getitem__(self, i: int) -> int:
        return self.exponents[i]

    def bump(self, i: int, by: int = 1) -> MultiIndex:
        """σ + by·1_i."""
        e = list(self.exponents)
        e[i] += by
        return MultiIndex(tuple(e))

    def __add__(self, other: MultiIndex) -> MultiIndex:
        return MultiIndex(tuple(a + b for a, b in zip(self.exponents, other.exponents)))

    def __sub__(self, other: MultiIndex) -> MultiIndex:
        return MultiIndex(tuple(a - b for a, b in zip(self.exponents, other.exponents)))

    def dominates(self, other: MultiIndex) -> bool:
        """True iff self ≥ other componentwise (self is a D_ρ-consequence of other)."""
        return all(a >= b for a, b in zip(self.exponents, other.exponents))

    def sub_indices(self) -> Iterator[MultiIndex]:
        """All τ ≤ σ, in graded order."""
        ranges = [range(e + 1) for e in self.exponents]
        found = [MultiIndex(t) for t in itertools.product(*ranges)]
        yield from sorted(found, key=MultiIndex.graded_key)

    def binomial(self, tau: MultiIndex) -> int:
        """Π_i C(σ_i, τ_i)."""
        return math.prod(math.comb(a, b) for a, b in zip(self.exponents, tau.exponents))

    def graded_key(self) -> tuple[int, tuple[int, ...]]:
        return (self.order, self.exponents)

    def steps(self) -> Iterator[int]:
        """Independent-variable indices, with multiplicity, whose D's compose D_σ."""
        for i, e in enumerate(self.exponents):
            yield from itertools.repeat(i, e)


def multi_indices(n: int, max_order: int) -> list[MultiIndex]:
    """Every σ with |σ| ≤ max_order, in graded order."""
    found = [
        MultiIndex(t)
        for t in itertools.product(range(max_order + 1), repeat=n)
        if sum(t) <= max_order
    ]
    return sorted(found, key=MultiIndex.graded_key)


# ── Coordinates ───────────────────────────────────────────────────────────────


class CoordinateKind(enum.IntEnum):
    INDEPENDENT = 0
    JET = 1
    NONLOCAL = 2


@dataclass(frozen=True, slots=True)
class Coordinate:
    """x_i, u^j_σ or a covering fiber coordinate w_a."""

    kind: CoordinateKind
    index: int
    sigma: MultiIndex | None = None

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValueError(f"coordinate index must be >= 0, got {self.index}")
        if (self.kind is CoordinateKind.JET) != (self.sigma is not None):
            raise ValueError("exactly the jet coordinates carry a multi-index")

    @classmethod
    def independent(cls, i: int) -> Coordinate:
        return cls(CoordinateKind.INDEPENDENT, i)

    @classmethod
    def jet(cls, j: int, sigma: MultiIndex) -> Coordinate:
        return cls(CoordinateKind.JET, j, sigma)

    @classmethod
    def fiber(cls, a: int) -> Coordinate:
        return cls(CoordinateKind.NONLOCAL, a)

    @property
    def is_jet(self) -> bool:
        return self.kind is CoordinateKind.JET

    @property
    def is_nonlocal(self) -> bool:
        return self.kind is CoordinateKind.NONLOCAL

    @property
    def order(self) -> int:
        return self.sigma.order if self.sigma is not None else 0

    @property
    def sort_key(self) -> tuple:
        return _coordinate_key(self)


@lru_cache(maxsize=None)
def _coordinate_key(c: Coordinate) -> tuple:
    if c.sigma is None:
        return (int(c.kind), c.index, 0, ())
    return (int(c.kind), c.index, c.sigma.order, c.sigma.exponents)


# ── Sparse polynomial helpers ─────────────────────────────────────────────────
# A monomial is a tuple of (Coordinate, power) pairs sorted by coordinate key;
# a polynomial is a dict monomial → non-zero Fraction.

Monomial = tuple[tuple[Coordinate, int], ...]
Terms = dict[Monomial, Fraction]

ONE_MONOMIAL: Monomial = ()


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    if not a:
        return b
    if not b:
        return a
    powers: dict[Coordinate, int] = dict(a)
    for c, p in b:
        powers[c] = powers.get(c, 0) + p
    return tuple(sorted(powers.items(), key=lambda cp: _coordinate_key(cp[0])))


def _mono_drop(m: Monomial, c: Coordinate) -> Monomial:
    """m / c (one power), assuming c divides m."""
    out = []
    for d, p in m:
        if d == c:
            if p > 1:
                out.append((d, p - 1))
        else:
            out.append((d, p))
    return tuple(out)


def monomial_key(m: Monomial) -> tuple:
    """Ordering key: coordinates from highest to lowest, with multiplicity."""
    return tuple(
        _coordinate_key(c) for c, p in reversed(m) for _ in range(p)
    )


def _add_into(acc: Terms, terms: Mapping[Monomial, Fraction], scale: Fraction = Fraction(1)) -> None:
    for m, q in terms.items():
        v = acc.get(m, 0) + q * scale
        if v:
            acc[m] = v
        else:
            acc.pop(m, None)


def _mul_terms(a: Mapping[Monomial, Fraction], b: Mapping[Monomial, Fraction]) -> Terms:
    out: Terms = {}
    for ma, qa in a.items():
        for mb, qb in b.items():
            m = _mono_mul(ma, mb)
            v = out.get(m, 0) + qa * qb
            if v:
                out[m] = v
            else:
                out.pop(m, None)
    return out


def _scale_terms(a: Mapping[Monomial, Fraction], q: Fraction) -> Terms:
    if not q:
        return {}
    return {m: c * q for m, c in a.items()}


def _leading(terms: Mapping[Monomial, Fraction]) -> Monomial:
    return max(terms, key=monomial_key)


def _is_one(terms: Mapping[Monomial, Fraction]) -> bool:
    return len(terms) == 1 and terms.get(ONE_MONOMIAL) == 1


def _constant_of(terms: Mapping[Monomial, Fraction]) -> Fraction | None:
    if not terms:
        return Fraction(0)
    if len(terms) == 1 and ONE_MONOMIAL in terms:
        return terms[ONE_MONOMIAL]
    return None


def _cancel(num: Terms, den: Terms) -> tuple[Terms, Terms]:
    """gcd-reduce num/den with sympy's sparse polynomial ring over QQ."""
    coords = sorted(
        {c for m in itertools.chain(num, den) for c, _ in m}, key=_coordinate_key
    )
    position = {c: k for k, c in enumerate(coords)}
    R, *_ = ring([f"c{k}" for k in range(len(coords))], QQ)

    def to_ring(terms: Terms):
        data = {}
        for m, q in terms.items():
            exps = [0] * len(coords)
            for c, p in m:
                exps[position[c]] = p
            data[tuple(exps)] = QQ(q.numerator, q.denominator)
        return R.from_dict(data)

    def from_ring(poly) -> Terms:
        out: Terms = {}
        for exps, q in poly.items():
            m = tuple((coords[k], e) for k, e in enumerate(exps) if e)
            out[m] = Fraction(int(q.numerator), int(q.denominator))
        return out

    p, q = to_ring(num).cancel(to_ring(den))
    return from_ring(p), from_ring(q)


# ── Expressions ───────────────────────────────────────────────────────────────


class JetExpr:
    """Canonical rational function of jet coordinates over ℚ (immutable)."""

    __slots__ = ("_num", "_den", "_hash", "_coords")

    def __init__(self, num: Mapping[Monomial, Fraction] | None = None,
                 den: Mapping[Monomial, Fraction] | None = None):
        n, d = _canonical_pair(dict(num or {}), dict(den) if den is not None else {ONE_MONOMIAL: Fraction(1)})
        self._num = n
        self._den = d
        self._hash: int | None = None
        self._coords: frozenset[Coordinate] | None = None

    @classmethod
    def _raw(cls, num: Terms, den: Terms | None = None) -> JetExpr:
        """Wrap parts that are already canonical (internal fast path)."""
        e = object.__new__(cls)
        e._num = num
        e._den = den if den is not None else {ONE_MONOMIAL: Fraction(1)}
        e._hash = None
        e._coords = None
        return e

    # ── constructors ─────────────────────────────────────────────────────────

    @classmethod
    def zero(cls) -> JetExpr:
        return _ZERO

    @classmethod
    def one(cls) -> JetExpr:
        return _ONE

    @classmethod
    def constant(cls, q: int | Fraction) -> JetExpr:
        q = Fraction(q)
        return cls._raw({ONE_MONOMIAL: q} if q else {})

    @classmethod
    def coordinate(cls, c: Coordinate, power: int = 1) -> JetExpr:
        if power == 0:
            return _ONE
        return cls._raw({((c, power),): Fraction(1)})

    @classmethod
    def monomial(cls, m: Monomial, coefficient: int | Fraction = 1) -> JetExpr:
        q = Fraction(coefficient)
        return cls._raw({m: q} if q else {})

    # ── inspection ───────────────────────────────────────────────────────────

    @property
    def num_terms(self) -> Mapping[Monomial, Fraction]:
        return self._num

    @property
    def den_terms(self) -> Mapping[Monomial, Fraction]:
        return self._den

    @property
    def is_zero(self) -> bool:
        return not self._num

    @property
    def is_polynomial(self) -> bool:
        return _is_one(self._den)

    @property
    def constant_value(self) -> Fraction | None:
        """The rational value when the expression is constant, else None."""
        if not self.is_polynomial:
            return None
        return _constant_of(self._num)

    def numerator(self) -> JetExpr:
        return JetExpr._raw(self._num)

    def denominator(self) -> JetExpr:
        return JetExpr._raw(self._den)

    def coordinates(self) -> frozenset[Coordinate]:
        if self._coords is None:
            self._coords = frozenset(
                c for m in itertools.chain(self._num, self._den) for c, _ in m
            )
        return self._coords

    def has_nonlocal(self) -> bool:
        return any(c.is_nonlocal for c in self.coordinates())

    def terms(self) -> list[tuple[Fraction, Monomial]]:
        """Numerator terms, highest monomial first."""
        return [(self._num[m], m) for m in sorted(self._num, key=monomial_key, reverse=True)]

    def degree_in(self, c: Coordinate) -> int:
        return max((p for m in self._num for d, p in m if d == c), default=0)

    def collect(self, c: Coordinate) -> dict[int, JetExpr]:
        """Polynomial only: {power: coefficient of c^power}."""
        if not self.is_polynomial:
            raise ValueError("collect() needs a polynomial")
        buckets: dict[int, Terms] = {}
        for m, q in self._num.items():
            power = 0
            rest = []
            for d, p in m:
                if d == c:
                    power = p
                else:
                    rest.append((d, p))
            buckets.setdefault(power, {})[tuple(rest)] = q
        return {p: JetExpr._raw(t) for p, t in buckets.items()}

    # ── arithmetic ───────────────────────────────────────────────────────────

    def __add__(self, other: JetExpr | int | Fraction) -> JetExpr:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            return self
        if self.is_zero:
            return other
        if self._den == other._den:
            num = dict(self._num)
            _add_into(num, other._num)
            if self.is_polynomial:
                return JetExpr._raw(num)
            return JetExpr(num, self._den)
        num = _mul_terms(self._num, other._den)
        _add_into(num, _mul_terms(other._num, self._den))
        return JetExpr(num, _mul_terms(self._den, other._den))

    __radd__ = __add__

    def __neg__(self) -> JetExpr:
        return JetExpr._raw(_scale_terms(self._num, Fraction(-1)), self._den)

    def __sub__(self, other: JetExpr | int | Fraction) -> JetExpr:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other: int | Fraction) -> JetExpr:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other: JetExpr | int | Fraction) -> JetExpr:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if self.is_zero or other.is_zero:
            return _ZERO
        k = other.constant_value
        if k is not None:
            return JetExpr._raw(_scale_terms(self._num, k), self._den)
        k = self.constant_value
        if k is not None:
            return JetExpr._raw(_scale_terms(other._num, k), other._den)
        num = _mul_terms(self._num, other._num)
        if self.is_polynomial and other.is_polynomial:
            return JetExpr._raw(num)
        return JetExpr(num, _mul_terms(self._den, other._den))

    __rmul__ = __mul__

    def __truediv__(self, other: JetExpr | int | Fraction) -> JetExpr:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        if other.is_zero:
            raise ZeroDenominatorError("division by the zero expression")
        k = other.constant_value
        if k is not None:
            return JetExpr._raw(_scale_terms(self._num, 1 / k), self._den)
        return JetExpr(_mul_terms(self._num, other._den), _mul_terms(self._den, other._num))

    def __rtruediv__(self, other: int | Fraction) -> JetExpr:
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other / self

    def __pow__(self, n: int) -> JetExpr:
        if not isinstance(n, int):
            return NotImplemented
        if n < 0:
            return _ONE / (self ** (-n))
        result, base = _ONE, self
        while n:
            if n & 1:
                result = result * base
            n >>= 1
            if n:
                base = base * base
        return result

    # ── identity ─────────────────────────────────────────────────────────────

    def __eq__(self, other: object) -> bool:
        if isinstance(other, (int, Fraction)):
            other = JetExpr.constant(other)
        if not isinstance(other, JetExpr):
            return NotImplemented
        return self._num == other._num and self._den == other._den

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((frozenset(self._num.items()), frozenset(self._den.items())))
        return self._hash

    def __bool__(self) -> bool:
        return not self.is_zero

    def __repr__(self) -> str:
        from jetcalc.parser import render_generic

        return f"JetExpr({render_generic(self)!r})"

    def __str__(self) -> str:
        from jetcalc.parser import render_generic

        return render_generic(self)


def _coerce(value: object) -> JetExpr:
    if isinstance(value, JetExpr):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return JetExpr.constant(value)
    return NotImplemented


def _canonical_pair(num: Terms, den: Terms) -> tuple[Terms, Terms]:
    num = {m: Fraction(q) for m, q in num.items() if q}
    den = {m: Fraction(q) for m, q in den.items() if q}
    if not den:
        raise ZeroDenominatorError("denominator is the zero expression")
    if not num:
        return {}, {ONE_MONOMIAL: Fraction(1)}
    k = _constant_of(den)
    if k is not None:
        return _scale_terms(num, 1 / k), {ONE_MONOMIAL: Fraction(1)}
    num, den = _cancel(num, den)
    k = _constant_of(den)
    if k is not None:
        return _scale_terms(num, 1 / k), {ONE_MONOMIAL: Fraction(1)}
    lead = den[_leading(den)]
    return _scale_terms(num, 1 / lead), _scale_terms(den, 1 / lead)


_ZERO = JetExpr._raw({})
_ONE = JetExpr._raw({ONE_MONOMIAL: Fraction(1)})


# ── Kernel operations ─────────────────────────────────────────────────────────


def normalize(e: JetExpr) -> JetExpr:
    """Re-derive the canonical representative from the stored parts."""
    return JetExpr(e.num_terms, e.den_terms)


def partial(e: JetExpr, c: Coordinate) -> JetExpr:
    """∂e/∂c, every coordinate treated as an independent symbol."""
    return apply_derivation(e, lambda d: _ONE if d == c else None)


def apply_derivation(e: JetExpr, image: Callable[[Coordinate], JetExpr | None]) -> JetExpr:
    """Σ_c image(c) · ∂e/∂c over the coordinates occurring in e.

    ``image`` returns None (or zero) for coordinates the derivation ignores.
    Fractions go through the quotient rule.
    """
    cache: dict[Coordinate, JetExpr | None] = {}

    def lookup(c: Coordinate) -> JetExpr | None:
        if c not in cache:
            img = image(c)
            cache[c] = img if img is not None and not img.is_zero else None
        return cache[c]

    def on_terms(terms: Mapping[Monomial, Fraction]) -> JetExpr:
        poly: Terms = {}
        rational: list[JetExpr] = []
        for m, q in terms.items():
            for c, p in m:
                img = lookup(c)
                if img is None:
                    continue
                rest = _mono_drop(m, c)
                scale = q * p
                if img.is_polynomial:
                    for mi, qi in img.num_terms.items():
                        mm = _mono_mul(rest, mi)
                        v = poly.get(mm, 0) + scale * qi
                        if v:
                            poly[mm] = v
                        else:
                            poly.pop(mm, None)
                else:
                    rational.append(JetExpr.monomial(rest, scale) * img)
        out = JetExpr._raw(poly)
        for r in rational:
            out = out + r
        return out

    if e.is_polynomial:
        return on_terms(e.num_terms)
    num, den = e.numerator(), e.denominator()
    d_num, d_den = on_terms(num.num_terms), on_terms(den.num_terms)
    return (d_num * den - num * d_den) / (den * den)


def substitute(e: JetExpr, bindings: Mapping[Coordinate, JetExpr]) -> JetExpr:
    """Simultaneous substitution of coordinates, result canonical."""
    if not bindings or not (e.coordinates() & bindings.keys()):
        return e
    powers: dict[tuple[Coordinate, int], JetExpr] = {}

    def power(c: Coordinate, p: int) -> JetExpr:
        key = (c, p)
        if key not in powers:
            powers[key] = bindings[c] ** p
        return powers[key]

    def evaluate(terms: Mapping[Monomial, Fraction]) -> JetExpr:
        kept: Terms = {}
        bound: list[JetExpr] = []
        for m, q in terms.items():
            free = tuple((c, p) for c, p in m if c not in bindings)
            if len(free) == len(m):
                _add_into(kept, {m: q})
                continue
            value = JetExpr.monomial(free, q)
            for c, p in m:
                if c in bindings:
                    value = value * power(c, p)
            bound.append(value)
        out = JetExpr._raw(kept)
        for b in bound:
            out = out + b
        return out

    num = evaluate(e.num_terms)
    if e.is_polynomial:
        return num
    den = evaluate(e.den_terms)
    if den.is_zero:
        raise ZeroDenominatorError("substitution makes the denominator vanish")
    return num / den


def sum_exprs(items: Iterable[JetExpr]) -> JetExpr:
    """Sum with a single accumulation for the polynomial parts."""
    poly: Terms = {}
    rest = _ZERO
    for item in items:
        if item.is_polynomial:
            _add_into(poly, item.num_terms)
        else:
            rest = rest + item
    return JetExpr._raw(poly) + rest
