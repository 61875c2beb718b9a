"""
Unit tests for expression parsing and canonical rendering.
"""

from __future__ import annotations

import pytest

from jetcalc.context import JetContext
from jetcalc.errors import (
    ExpressionSyntaxError,
    InvalidContextError,
    UndeclaredIdentifierError,
)
from jetcalc.parser import parse, render, render_generic
from tests.conftest import XT_U, P, random_polynomial


class TestParse:
    def test_kdv_right_hand_side(self):
        e = P("u*u_x + u_xxx")
        assert len(e.num_terms) == 2
        assert XT_U.u(0, (3, 0)) in e.coordinates()

    def test_zero_literal(self):
        assert P("0").is_zero

    def test_braced_suffix(self):
        assert P("u_{xxt}") == P("u_xxt")
        assert P("u_xtx") == P("u_xxt")

    def test_power_forms(self):
        assert P("u^2") == P("u**2") == P("u*u")
        assert P("2^3") == 8

    def test_power_is_right_associative(self):
        assert P("2^3^2") == 512

    def test_unary_minus(self):
        assert P("-u^2") == -(P("u") ** 2)

    def test_rational_literal(self):
        assert P("1/2*u^2") == P("u^2/2")

    def test_undeclared_identifier(self):
        with pytest.raises(UndeclaredIdentifierError, match="'v'"):
            P("u + v")

    def test_undeclared_derivative_variable(self):
        with pytest.raises(UndeclaredIdentifierError):
            P("u_y")

    def test_syntax_error_has_position(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            P("u + * u_x")
        assert info.value.position >= 0

    def test_non_integer_exponent(self):
        with pytest.raises(ExpressionSyntaxError, match="integer"):
            P("u^(1/2)")

    def test_zero_denominator_literal(self):
        with pytest.raises(ExpressionSyntaxError, match="zero denominator") as info:
            P("u/0")
        assert info.value.position == 1
        assert info.value.exit_code == 2

    def test_denominator_cancelling_to_zero(self):
        with pytest.raises(ExpressionSyntaxError) as info:
            P("u_x + 1/(u - u)")
        assert info.value.position == 7


class TestRender:
    def test_zero(self):
        assert render(P("0"), XT_U) == "0"

    def test_simple(self):
        assert render(P("u_x"), XT_U) == "u_x"
        assert render(P("-u*u_x"), XT_U) == "-u*u_x"

    def test_mixed_derivative_name(self):
        assert render(P("u_txx"), XT_U) == "u_xxt"

    def test_round_trip(self, rng):
        for _ in range(50):
            e = random_polynomial(rng, XT_U, max_order=4, terms=4, max_degree=3)
            assert parse(render(e, XT_U), XT_U) == e

    def test_round_trip_rational(self, rng):
        for _ in range(20):
            e = random_polynomial(rng, XT_U) / (random_polynomial(rng, XT_U, terms=2) + P("u_xxxx"))
            assert parse(render(e, XT_U), XT_U) == e

    def test_deterministic(self):
        e = P("u_xxx + u*u_x + x*t - 3/4")
        assert render(e, XT_U) == render(P("-3/4 + t*x + u_x*u + u_xxx"), XT_U)

    def test_generic_names(self):
        assert render_generic(P("u_x")) == "u0_(1,0)"


class TestContext:
    def test_from_names(self):
        ctx = JetContext.from_names("x, t", "u, v")
        assert ctx.n == 2 and ctx.m == 2

    def test_duplicate_names(self):
        with pytest.raises(InvalidContextError, match="distinct"):
            JetContext(("x", "t"), ("x",))

    def test_reserved_names(self):
        with pytest.raises(InvalidContextError):
            JetContext(("x",), ("D",))

    def test_prefix_ambiguity(self):
        with pytest.raises(InvalidContextError, match="prefix"):
            JetContext(("x", "xx"), ("u",))

    def test_needs_variables(self):
        with pytest.raises(InvalidContextError):
            JetContext((), ("u",))

    def test_lookup(self):
        assert XT_U.lookup("u_xt") == XT_U.u(0, (1, 1))
        assert XT_U.lookup("w") is None
