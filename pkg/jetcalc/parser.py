"""
Concrete syntax for jet expressions.

Grammar (whitespace insignificant)::

    expr    :: term [ ('+' | '-') term ]*
    term    :: signed [ ('*' | '/') signed ]*
    signed  :: ['-' | '+'] power
    power   :: atom [ ('^' | '**') power ]          right-associative
    atom    :: integer | identifier | '(' expr ')'

An identifier is a declared name or a derivative coordinate ``u_xxt`` /
``u_{xxt}``. Exponents must evaluate to integer constants; ``p/q`` is an
exact rational. Rendering produces text that parses back to the same
canonical expression.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass
from fractions import Fraction

import pyparsing as pp

from jetcalc.context import JetContext
from jetcalc.errors import ExpressionSyntaxError, UndeclaredIdentifierError
from jetcalc.expr import Coordinate, CoordinateKind, JetExpr, Monomial

logger = logging.getLogger(__name__)

pp.ParserElement.enable_packrat()


@dataclass(frozen=True)
class _Name:
    text: str
    position: int


class _Operator(str):
    """An infix operator token remembering where it stood."""

    position: int

    def __new__(cls, text: str, position: int) -> _Operator:
        op = super().__new__(cls, text)
        op.position = position
        return op


def _build_grammar() -> pp.ParserElement:
    integer = pp.Word(pp.nums).set_parse_action(lambda t: int(t[0]))
    identifier = pp.Regex(
        r"[A-Za-z][A-Za-z0-9]*(_(\{[A-Za-z0-9]+\}|[A-Za-z0-9]+))?"
    ).set_parse_action(lambda s, loc, t: _Name(t[0], loc))
    operand = integer | identifier
    product = pp.one_of("* /").set_parse_action(lambda s, loc, t: _Operator(t[0], loc))
    return pp.infix_notation(
        operand,
        [
            (pp.one_of("^ **"), 2, pp.OpAssoc.RIGHT),
            (pp.one_of("+ -"), 1, pp.OpAssoc.RIGHT),
            (product, 2, pp.OpAssoc.LEFT),
            (pp.one_of("+ -"), 2, pp.OpAssoc.LEFT),
        ],
    )


_GRAMMAR = _build_grammar()


def parse(text: str, ctx: JetContext) -> JetExpr:
    """Parse ``text`` into its canonical JetExpr."""
    try:
        tree = _GRAMMAR.parse_string(text, parse_all=True)
    except pp.ParseException as exc:
        raise ExpressionSyntaxError(f"cannot parse {text!r}: {exc.msg}", exc.loc) from None
    return _evaluate(tree[0], ctx)


def _evaluate(node: object, ctx: JetContext) -> JetExpr:
    if isinstance(node, int):
        return JetExpr.constant(node)
    if isinstance(node, _Name):
        c = ctx.lookup(node.text)
        if c is None:
            raise UndeclaredIdentifierError(node.text, node.position)
        return JetExpr.coordinate(c)

    items = list(node)
    if len(items) == 2:
        sign, operand = items
        value = _evaluate(operand, ctx)
        return -value if sign == "-" else value

    if items[1] in ("^", "**"):
        # right-associative chain a ^ b ^ c
        exponent = _evaluate(items[-1], ctx)
        for k in range(len(items) - 3, -1, -2):
            base = _evaluate(items[k], ctx)
            exponent = base ** _integer_exponent(exponent)
        return exponent

    value = _evaluate(items[0], ctx)
    for op, operand in zip(items[1::2], items[2::2]):
        rhs = _evaluate(operand, ctx)
        if op == "+":
            value = value + rhs
        elif op == "-":
            value = value - rhs
        elif op == "*":
            value = value * rhs
        elif rhs.is_zero:
            raise ExpressionSyntaxError("division by a zero denominator", getattr(op, "position", 0))
        else:
            value = value / rhs
    return value


def _integer_exponent(e: JetExpr) -> int:
    q = e.constant_value
    if q is None or q.denominator != 1:
        raise ExpressionSyntaxError("exponents must be integer constants", 0)
    return int(q)


# ── Rendering ─────────────────────────────────────────────────────────────────


def render(e: JetExpr, ctx: JetContext) -> str:
    """Canonical text, highest monomial first; ``parse(render(e)) == e``."""
    return _render(e, ctx.name_of)


def render_generic(e: JetExpr) -> str:
    """Context-free rendering (``x0``, ``u0_(1,0)``, ``w0``) for repr/logging."""
    return _render(e, _generic_name)


def _generic_name(c: Coordinate) -> str:
    if c.kind is CoordinateKind.INDEPENDENT:
        return f"x{c.index}"
    if c.kind is CoordinateKind.NONLOCAL:
        return f"w{c.index}"
    if c.sigma.order == 0:
        return f"u{c.index}"
    return f"u{c.index}_({','.join(map(str, c.sigma.exponents))})"


def _render(e: JetExpr, name_of) -> str:
    num = _render_terms(e.terms(), name_of)
    if e.is_polynomial:
        return num
    den = e.denominator()
    den_terms = den.terms()
    den_text = _render_terms(den_terms, name_of)
    if len(den_terms) > 1 or len(den_terms[0][1]) > 1:
        den_text = f"({den_text})"
    if len(e.num_terms) > 1:
        num = f"({num})"
    return f"{num}/{den_text}"


def _render_terms(terms: list[tuple[Fraction, Monomial]], name_of) -> str:
    if not terms:
        return "0"
    pieces: list[str] = []
    for k, (q, m) in enumerate(terms):
        negative = q < 0
        body = _render_term(abs(q), m, name_of)
        if k == 0:
            pieces.append(f"-{body}" if negative else body)
        else:
            pieces.append(f" - {body}" if negative else f" + {body}")
    return "".join(pieces)


def _render_term(q: Fraction, m: Monomial, name_of) -> str:
    factors = [name_of(c) if p == 1 else f"{name_of(c)}^{p}" for c, p in m]
    coefficient = str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"
    if not factors:
        return coefficient
    if q == 1:
        return "*".join(factors)
    return "*".join([coefficient, *factors])
